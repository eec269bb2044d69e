//! Root data, finite Weyl groups, and characteristic-zero character
//! arithmetic for the dual group.
//!
//! A [`RootDatum`] holds a character lattice `X = Z^r`, a cocharacter lattice
//! `X∨ = Z^r` paired by the coordinate dot product, and matched lists of
//! simple roots (in `X`) and simple coroots (in `X∨`). Everything else —
//! positive roots, `ρ∨`, highest roots, Coxeter numbers — is derived by
//! reflection closure at construction time.
//!
//! Characters live on the *coweight* side: `weyl_character(λ)` is the weight
//! multiplicity table of the induced module of highest weight `λ` for the
//! group whose roots are our coroots. Multiplicities are computed by the
//! Freudenthal recursion, exactly.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::matrix::{solve_integer, IntMat};
use crate::{Error, Result};

/// One irreducible component of the root system.
#[derive(Clone, Debug)]
pub struct IrreducibleComponent {
    /// Indices of the simple roots belonging to this component.
    pub simple_indices: Vec<usize>,
    /// Index into `positive_roots` of the highest root.
    pub highest_root: usize,
    /// Index into `positive_roots` of the root whose coroot is the highest
    /// coroot.
    pub highest_coroot: usize,
    /// Coxeter number `h` (height of the highest root plus one).
    pub coxeter_number: i64,
}

/// A based root datum with the pairing fixed as the coordinate dot product.
#[derive(Clone, Debug)]
pub struct RootDatum {
    rank: usize,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    positive_roots: Vec<Vec<i64>>,
    positive_coroots: Vec<Vec<i64>>,
    /// Coefficients of each positive root over the simple roots.
    positive_root_coeffs: Vec<Vec<i64>>,
    /// `2ρ∨`, the sum of the positive coroots.
    rho_check_doubled: Vec<i64>,
    components: Vec<IrreducibleComponent>,
    fingerprint: u64,
}

/// Isogeny type for the built-in constructions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isogeny {
    Adjoint,
    SimplyConnected,
}

const MAX_ROOTS: usize = 4096;

impl RootDatum {
    /// Builds a datum from explicit simple roots and coroots.
    pub fn from_matrices(
        rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    ) -> Result<Arc<RootDatum>> {
        if rank == 0 {
            return Err(Error::Validation("rank must be positive".into()));
        }
        if simple_roots.len() != simple_coroots.len() {
            return Err(Error::Validation(
                "simple roots and coroots must match in number".into(),
            ));
        }
        if simple_roots.len() > rank {
            return Err(Error::Validation(
                "more simple roots than the rank of the lattice".into(),
            ));
        }
        for v in simple_roots.iter().chain(simple_coroots.iter()) {
            if v.len() != rank {
                return Err(Error::Validation(
                    "root/coroot coordinate length differs from rank".into(),
                ));
            }
        }

        let s = simple_roots.len();
        // Cartan matrix A_ij = <α_i∨, α_j>.
        let cartan: Vec<Vec<i64>> = (0..s)
            .map(|i| (0..s).map(|j| dot(&simple_coroots[i], &simple_roots[j])).collect())
            .collect();
        validate_cartan(&cartan)?;

        let closure = reflection_closure(&simple_roots, &simple_coroots, &cartan)?;
        let components = find_components(&cartan, &closure)?;

        let mut rho2 = vec![0i64; rank];
        for cv in &closure.positive_coroots {
            for (t, &c) in rho2.iter_mut().zip(cv) {
                *t += c;
            }
        }
        // Cross-check of the closure: <ρ∨, α_i> = 1 for every simple root.
        for a in &simple_roots {
            if dot(&rho2, a) != 2 {
                return Err(Error::Invariant(
                    "sum of positive coroots does not pair to 2 with a simple root".into(),
                ));
            }
        }

        let fingerprint = fingerprint(rank, &simple_roots, &simple_coroots);
        Ok(Arc::new(RootDatum {
            rank,
            simple_roots,
            simple_coroots,
            positive_roots: closure.positive_roots,
            positive_coroots: closure.positive_coroots,
            positive_root_coeffs: closure.positive_root_coeffs,
            rho_check_doubled: rho2,
            components,
            fingerprint,
        }))
    }

    /// Builds a datum for a named type, e.g. `"A2"`, `"B2"`, `"G2"`,
    /// `"A1xA1"`, in the given isogeny.
    pub fn from_type(type_str: &str, isogeny: Isogeny) -> Result<Arc<RootDatum>> {
        let cartan = cartan_of_type(type_str)?;
        let r = cartan.len();
        let mut simple_roots = Vec::with_capacity(r);
        let mut simple_coroots = Vec::with_capacity(r);
        match isogeny {
            Isogeny::Adjoint => {
                // X = root lattice with basis the simple roots; the dual
                // basis of X∨ is the fundamental coweights, so the i-th
                // simple coroot has coordinates the i-th row of the Cartan
                // matrix.
                for i in 0..r {
                    simple_roots.push(unit_vec(r, i));
                    simple_coroots.push(cartan[i].clone());
                }
            }
            Isogeny::SimplyConnected => {
                // X∨ = coroot lattice with basis the simple coroots; the
                // j-th simple root has coordinates the j-th column of the
                // Cartan matrix in the fundamental-weight basis of X.
                for j in 0..r {
                    simple_roots.push((0..r).map(|i| cartan[i][j]).collect());
                    simple_coroots.push(unit_vec(r, j));
                }
            }
        }
        Self::from_matrices(r, simple_roots, simple_coroots)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_simple(&self) -> usize {
        self.simple_roots.len()
    }

    /// Roots span the rational span of the lattice.
    pub fn is_semisimple(&self) -> bool {
        self.num_simple() == self.rank
    }

    pub fn simple_roots(&self) -> &[Vec<i64>] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vec<i64>] {
        &self.simple_coroots
    }

    /// Positive roots, ordered by (height, lexicographic coefficients).
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    /// Positive coroots, in the order matching `positive_roots`.
    pub fn positive_coroots(&self) -> &[Vec<i64>] {
        &self.positive_coroots
    }

    pub fn positive_root_coeffs(&self) -> &[Vec<i64>] {
        &self.positive_root_coeffs
    }

    /// `2ρ∨` as an integer vector (`ρ∨` itself may be half-integral).
    pub fn rho_check_doubled(&self) -> &[i64] {
        &self.rho_check_doubled
    }

    /// `ρ∨` when it is integral, i.e. when every coordinate of `2ρ∨` is even.
    pub fn rho_check(&self) -> Result<Vec<i64>> {
        self.rho_check_doubled
            .iter()
            .map(|&c| {
                if c % 2 == 0 {
                    Ok(c / 2)
                } else {
                    Err(Error::Validation(
                        "ρ∨ is not integral for this root datum".into(),
                    ))
                }
            })
            .collect()
    }

    pub fn components(&self) -> &[IrreducibleComponent] {
        &self.components
    }

    /// Coxeter number of a quasi-simple datum.
    pub fn coxeter_number(&self) -> Result<i64> {
        match self.components.len() {
            1 => Ok(self.components[0].coxeter_number),
            _ => Err(Error::Validation(
                "Coxeter number requested for a reducible root datum".into(),
            )),
        }
    }

    /// `<λ, α>` for a coweight `λ` and a weight `α`.
    pub fn pairing(&self, coweight: &[i64], weight: &[i64]) -> i64 {
        dot(coweight, weight)
    }

    pub fn is_dominant(&self, coweight: &[i64]) -> bool {
        self.simple_roots.iter().all(|a| dot(coweight, a) >= 0)
    }

    /// Stable content hash, used to tie data files to the datum.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn fingerprint_hex(&self) -> String {
        format!("{:016x}", self.fingerprint)
    }

    /// Reflection `s_α` acting on `X∨`, for the `i`-th positive root.
    pub fn coweight_reflection(&self, pos_root_index: usize) -> IntMat {
        let alpha = &self.positive_roots[pos_root_index];
        let alpha_v = &self.positive_coroots[pos_root_index];
        reflection_matrix(self.rank, alpha, alpha_v)
    }

    /// Membership of an arbitrary vector in the root system, as `(positive
    /// index, sign)`.
    pub fn classify_root(&self, v: &[i64]) -> Option<(usize, i64)> {
        if let Some(i) = self.positive_roots.iter().position(|r| r == v) {
            return Some((i, 1));
        }
        let neg: Vec<i64> = v.iter().map(|&c| -c).collect();
        self.positive_roots.iter().position(|r| *r == neg).map(|i| (i, -1))
    }

    /// Enumerates the finite Weyl group as matrices acting on `X∨`, with a
    /// canonical reduced word for each element. Desk-scale only.
    pub fn weyl_elements(&self) -> Result<Vec<(IntMat, Vec<usize>)>> {
        if self.rank > 4 {
            return Err(Error::Validation(
                "finite Weyl group enumeration is limited to rank <= 4".into(),
            ));
        }
        let gens: Vec<IntMat> = (0..self.num_simple())
            .map(|i| reflection_matrix(self.rank, &self.simple_roots[i], &self.simple_coroots[i]))
            .collect();
        let mut seen: HashMap<IntMat, Vec<usize>> = HashMap::new();
        let id = IntMat::identity(self.rank);
        seen.insert(id.clone(), vec![]);
        let mut queue = VecDeque::from([id]);
        while let Some(m) = queue.pop_front() {
            let word = seen[&m].clone();
            for (i, g) in gens.iter().enumerate() {
                let next = g.mul(&m);
                if !seen.contains_key(&next) {
                    let mut w = vec![i];
                    w.extend_from_slice(&word);
                    seen.insert(next.clone(), w);
                    queue.push_back(next);
                }
            }
            if seen.len() > 100_000 {
                return Err(Error::Invariant("finite Weyl group enumeration overflow".into()));
            }
        }
        let mut out: Vec<(IntMat, Vec<usize>)> = seen.into_iter().collect();
        out.sort_by(|a, b| (a.1.len(), &a.1, &a.0).cmp(&(b.1.len(), &b.1, &b.0)));
        Ok(out)
    }

    /// Weyl dimension formula on the dual group:
    /// `∏_{α>0} <λ+ρ∨, α> / <ρ∨, α>`, exact.
    pub fn weyl_dim(&self, lambda: &[i64]) -> Result<u64> {
        if !self.is_dominant(lambda) {
            return Err(Error::Validation("weyl_dim requires a dominant coweight".into()));
        }
        use num::BigInt;
        let mut num = BigInt::from(1);
        let mut den = BigInt::from(1);
        let lam2: Vec<i64> = lambda.iter().map(|&c| 2 * c).collect();
        for alpha in &self.positive_roots {
            let top = dot(&lam2, alpha) + dot(&self.rho_check_doubled, alpha);
            let bot = dot(&self.rho_check_doubled, alpha);
            num *= BigInt::from(top);
            den *= BigInt::from(bot);
        }
        let q = &num / &den;
        if &q * &den != num {
            return Err(Error::Invariant("Weyl dimension formula did not divide exactly".into()));
        }
        u64::try_from(q).map_err(|_| Error::Validation("Weyl dimension overflows u64".into()))
    }

    /// Exact weight multiplicities of the induced module `N(λ)` of the dual
    /// group, by the Freudenthal recursion.
    pub fn weyl_character(&self, lambda: &[i64]) -> Result<Character> {
        if !self.is_dominant(lambda) {
            return Err(Error::Validation("weyl_character requires a dominant coweight".into()));
        }
        // Work with doubled coweights so that ρ∨ shifts stay integral.
        let lam2: Vec<i64> = lambda.iter().map(|&c| 2 * c).collect();
        let rho2 = &self.rho_check_doubled;

        // Dominant weights below λ: λ - Σ c_i α_i∨ with Σ c_i <= <λ, 2ρ>/2,
        // i.e. Σ 2c_i <= <λ, 2ρ> where <α_i∨, 2ρ> = 2.
        let height_cap = {
            let two_rho: Vec<i64> = {
                let mut t = vec![0i64; self.rank];
                for a in &self.positive_roots {
                    for (ti, &ai) in t.iter_mut().zip(a) {
                        *ti += ai;
                    }
                }
                t
            };
            dot(lambda, &two_rho)
        };
        if height_cap < 0 {
            return Err(Error::Invariant("dominant coweight with negative height".into()));
        }

        let mut dominant: Vec<Vec<i64>> = Vec::new();
        let mut frontier: HashSet<Vec<i64>> = HashSet::from([lam2.clone()]);
        let mut seen: HashSet<Vec<i64>> = frontier.clone();
        // BFS over λ - (nonnegative span of simple coroots), truncated by the
        // pairing-with-ρ bound; this set is connected under single coroot
        // steps, so BFS reaches all of it.
        while let Some(v) = frontier.iter().next().cloned() {
            frontier.remove(&v);
            for av in &self.simple_coroots {
                let next: Vec<i64> = v.iter().zip(av).map(|(&x, &a)| x - 2 * a).collect();
                let drop: i64 = lam2.iter().zip(&next).map(|(&a, &b)| a - b).sum::<i64>();
                // Σ coords of 2(λ-ν) grows with height; prune by <·,2ρ>.
                let _ = drop;
                let ht2: i64 = {
                    // <λ - ν, 2ρ> = Σ_i 2 c_i with ν = λ - Σ c_i α_i∨.
                    let diff: Vec<i64> = lam2.iter().zip(&next).map(|(&a, &b)| (a - b) / 2).collect();
                    let mut s = 0;
                    for a in &self.positive_roots {
                        s += dot(&diff, a);
                    }
                    s
                };
                if ht2 > 2 * height_cap {
                    continue;
                }
                if seen.insert(next.clone()) {
                    frontier.insert(next);
                }
            }
        }
        for v in &seen {
            if self.simple_roots.iter().all(|a| dot(v, a) >= 0) {
                dominant.push(v.clone());
            }
        }
        // Order by decreasing height of ν (so λ first).
        let height = |v: &Vec<i64>| -> i64 {
            self.positive_roots.iter().map(|a| dot(v, a)).sum()
        };
        dominant.sort_by_key(|v| (-height(v), v.clone()));

        let b_form = |x: &[i64], y: &[i64]| -> i64 {
            self.positive_roots.iter().map(|a| dot(x, a) * dot(y, a)).sum()
        };

        let lam_rho: Vec<i64> = lam2.iter().zip(rho2).map(|(&a, &b)| a + b).collect();
        let n_lam = b_form(&lam_rho, &lam_rho);

        let mut mult: HashMap<Vec<i64>, u64> = HashMap::new();
        let index_of: HashMap<Vec<i64>, usize> =
            dominant.iter().cloned().zip(0..).collect();
        for v in &dominant {
            if v == &lam2 {
                mult.insert(v.clone(), 1);
                continue;
            }
            let mu_rho: Vec<i64> = v.iter().zip(rho2).map(|(&a, &b)| a + b).collect();
            let denom = n_lam - b_form(&mu_rho, &mu_rho);
            if denom <= 0 {
                // Not a weight of N(λ).
                continue;
            }
            let mut sum: i64 = 0;
            for av in &self.positive_coroots {
                let av2: Vec<i64> = av.iter().map(|&c| 2 * c).collect();
                let mut k = 1i64;
                loop {
                    let shifted: Vec<i64> =
                        v.iter().zip(&av2).map(|(&x, &a)| x + k * a).collect();
                    if height(&shifted) > height(&lam2) {
                        break;
                    }
                    let dom = self.dominant_representative_doubled(&shifted);
                    if let Some(&idx) = index_of.get(&dom) {
                        if let Some(&m) = mult.get(&dominant[idx]) {
                            if m > 0 {
                                sum += m as i64 * b_form(&shifted, &av2);
                            }
                        }
                    }
                    k += 1;
                }
            }
            let m2 = 2 * sum;
            if m2 % denom != 0 {
                return Err(Error::Invariant("Freudenthal recursion did not divide exactly".into()));
            }
            let m = m2 / denom;
            if m < 0 {
                return Err(Error::Invariant("negative Freudenthal multiplicity".into()));
            }
            if m > 0 {
                mult.insert(v.clone(), m as u64);
            }
        }

        // Expand to the full Weyl orbit of every dominant weight.
        let mut table: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        for (v2, m) in &mult {
            for w2 in self.weyl_orbit_doubled(v2) {
                let v: Vec<i64> = w2.iter().map(|&c| c / 2).collect();
                debug_assert!(w2.iter().all(|&c| c % 2 == 0));
                table.insert(v, *m);
            }
        }
        Ok(Character { weight_mults: table })
    }

    /// The dominant Weyl-chamber representative, on doubled coordinates.
    fn dominant_representative_doubled(&self, v: &[i64]) -> Vec<i64> {
        let mut cur = v.to_vec();
        loop {
            let mut moved = false;
            for i in 0..self.num_simple() {
                let p = dot(&cur, &self.simple_roots[i]);
                if p < 0 {
                    for (c, &a) in cur.iter_mut().zip(&self.simple_coroots[i]) {
                        *c -= p * a;
                    }
                    moved = true;
                }
            }
            if !moved {
                return cur;
            }
        }
    }

    fn weyl_orbit_doubled(&self, v: &[i64]) -> Vec<Vec<i64>> {
        let mut seen: HashSet<Vec<i64>> = HashSet::from([v.to_vec()]);
        let mut queue = VecDeque::from([v.to_vec()]);
        while let Some(cur) = queue.pop_front() {
            for i in 0..self.num_simple() {
                let p = dot(&cur, &self.simple_roots[i]);
                let mut next = cur.clone();
                for (c, &a) in next.iter_mut().zip(&self.simple_coroots[i]) {
                    *c -= p * a;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Canonical JSON form (used for the fingerprint and file output).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rank": self.rank,
            "simple_roots": self.simple_roots,
            "simple_coroots": self.simple_coroots,
        })
    }
}

/// A finite multiplicity table on the cocharacter lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    weight_mults: BTreeMap<Vec<i64>, u64>,
}

impl Character {
    pub fn from_mults(weight_mults: BTreeMap<Vec<i64>, u64>) -> Self {
        Character { weight_mults }
    }

    pub fn mult(&self, weight: &[i64]) -> u64 {
        self.weight_mults.get(weight).copied().unwrap_or(0)
    }

    pub fn weight_mults(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.weight_mults
    }

    /// Total mass, i.e. the dimension of the underlying module.
    pub fn total(&self) -> u64 {
        self.weight_mults.values().sum()
    }

    /// Sorted array of `{"weight": [...], "mult": n}` records.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.weight_mults
                .iter()
                .map(|(w, m)| serde_json::json!({"weight": w, "mult": m}))
                .collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Character> {
        #[derive(Deserialize)]
        struct Entry {
            weight: Vec<i64>,
            mult: u64,
        }
        let entries: Vec<Entry> = serde_json::from_value(value.clone())
            .map_err(|e| Error::DataFile(format!("bad character table: {e}")))?;
        let mut table = BTreeMap::new();
        for e in entries {
            if e.mult == 0 || table.insert(e.weight, e.mult).is_some() {
                return Err(Error::DataFile("character table has a zero or repeated weight".into()));
            }
        }
        Ok(Character { weight_mults: table })
    }
}

// ---------------------------------------------------------------------------
// construction internals

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn unit_vec(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn reflection_matrix(rank: usize, alpha: &[i64], alpha_v: &[i64]) -> IntMat {
    // μ -> μ - <μ, α> α∨ on X∨.
    let rows: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| (if i == j { 1 } else { 0 }) - alpha_v[i] * alpha[j])
                .collect()
        })
        .collect();
    IntMat::from_rows(&rows)
}

fn validate_cartan(cartan: &[Vec<i64>]) -> Result<()> {
    let n = cartan.len();
    for i in 0..n {
        if cartan[i][i] != 2 {
            return Err(Error::Validation("Cartan matrix must have 2 on the diagonal".into()));
        }
        for j in 0..n {
            if i != j {
                if cartan[i][j] > 0 {
                    return Err(Error::Validation(
                        "Cartan matrix must be nonpositive off the diagonal".into(),
                    ));
                }
                if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                    return Err(Error::Validation(
                        "Cartan matrix zero pattern must be symmetric".into(),
                    ));
                }
            }
        }
    }
    Ok(())
}

struct Closure {
    positive_roots: Vec<Vec<i64>>,
    positive_coroots: Vec<Vec<i64>>,
    positive_root_coeffs: Vec<Vec<i64>>,
}

/// Closes the simple roots under all reflections. Terminating with a finite
/// set certifies finite type; blowing past the cap reports infinite type.
fn reflection_closure(
    simple_roots: &[Vec<i64>],
    simple_coroots: &[Vec<i64>],
    cartan: &[Vec<i64>],
) -> Result<Closure> {
    let s = simple_roots.len();
    // Track (root, coroot, coefficients over simple roots); reflections act
    // on the coefficient vector through the Cartan matrix, so positivity is
    // exact sign inspection.
    type Item = (Vec<i64>, Vec<i64>, Vec<i64>);
    let mut items: Vec<Item> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for i in 0..s {
        let item = (simple_roots[i].clone(), simple_coroots[i].clone(), unit_vec(s, i));
        seen.insert(item.2.clone());
        items.push(item);
    }
    let mut queue: VecDeque<Item> = items.iter().cloned().collect();
    while let Some((root, coroot, coeffs)) = queue.pop_front() {
        for i in 0..s {
            // <α∨_i, root> from the coefficient vector and the Cartan matrix.
            let p: i64 = (0..s).map(|j| cartan[i][j] * coeffs[j]).sum();
            let new_coeffs: Vec<i64> = {
                let mut c = coeffs.clone();
                c[i] -= p;
                c
            };
            if seen.contains(&new_coeffs) {
                continue;
            }
            let new_root: Vec<i64> = root
                .iter()
                .zip(&simple_roots[i])
                .map(|(&r, &a)| r - p * a)
                .collect();
            // s_i on the coroot side subtracts <coroot, α_i> α_i∨.
            let q = dot(&coroot, &simple_roots[i]);
            let new_coroot: Vec<i64> = coroot
                .iter()
                .zip(&simple_coroots[i])
                .map(|(&r, &a)| r - q * a)
                .collect();
            seen.insert(new_coeffs.clone());
            let item = (new_root, new_coroot, new_coeffs);
            items.push(item.clone());
            queue.push_back(item);
            if items.len() > MAX_ROOTS {
                return Err(Error::Validation(
                    "reflection closure does not terminate: not a finite-type Cartan matrix".into(),
                ));
            }
        }
    }

    let mut positives: Vec<Item> = items
        .into_iter()
        .filter(|(_, _, c)| c.iter().all(|&x| x >= 0))
        .collect();
    positives.sort_by_key(|(_, _, c)| (c.iter().sum::<i64>(), c.clone()));
    if positives.len() * 2 != seen.len() {
        return Err(Error::Invariant("root system is not symmetric under negation".into()));
    }
    Ok(Closure {
        positive_roots: positives.iter().map(|(r, _, _)| r.clone()).collect(),
        positive_coroots: positives.iter().map(|(_, cv, _)| cv.clone()).collect(),
        positive_root_coeffs: positives.iter().map(|(_, _, c)| c.clone()).collect(),
    })
}

fn find_components(cartan: &[Vec<i64>], closure: &Closure) -> Result<Vec<IrreducibleComponent>> {
    let s = cartan.len();
    let mut comp_of = vec![usize::MAX; s];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..s {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        let mut members = vec![];
        comp_of[start] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..s {
                if j != i && cartan[i][j] != 0 && comp_of[j] == usize::MAX {
                    comp_of[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    // Components are ordered by their smallest simple index already.
    comps.sort_by_key(|m| m[0]);

    let mut out = Vec::new();
    for members in comps {
        let in_comp = |coeffs: &Vec<i64>| -> bool {
            coeffs
                .iter()
                .enumerate()
                .all(|(j, &c)| c == 0 || members.contains(&j))
        };
        let mut best_root: Option<(i64, usize)> = None;
        let mut best_coroot: Option<(i64, usize)> = None;
        for (idx, coeffs) in closure.positive_root_coeffs.iter().enumerate() {
            if !in_comp(coeffs) || coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let ht: i64 = coeffs.iter().sum();
            if best_root.is_none_or(|(h, _)| ht > h) {
                best_root = Some((ht, idx));
            }
            // Coroot height: coefficients of the coroot over simple coroots.
            let cr_ht = coroot_height(closure, idx)?;
            if best_coroot.is_none_or(|(h, _)| cr_ht > h) {
                best_coroot = Some((cr_ht, idx));
            }
        }
        let (root_ht, highest_root) =
            best_root.ok_or_else(|| Error::Invariant("component without roots".into()))?;
        let (_, highest_coroot) =
            best_coroot.ok_or_else(|| Error::Invariant("component without coroots".into()))?;
        out.push(IrreducibleComponent {
            simple_indices: members,
            highest_root,
            highest_coroot,
            coxeter_number: root_ht + 1,
        });
    }
    Ok(out)
}

fn coroot_height(closure: &Closure, idx: usize) -> Result<i64> {
    // Solve coroot = Σ c_i (simple coroots); heights are small, solve exactly.
    let simple_coroots: Vec<Vec<i64>> = closure
        .positive_root_coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.iter().sum::<i64>() == 1)
        .map(|(i, _)| closure.positive_coroots[i].clone())
        .collect();
    let coeffs = solve_integer(&simple_coroots, &closure.positive_coroots[idx])
        .ok_or_else(|| Error::Invariant("coroot outside the coroot lattice".into()))?;
    Ok(coeffs.iter().sum())
}

fn fingerprint(rank: usize, simple_roots: &[Vec<i64>], simple_coroots: &[Vec<i64>]) -> u64 {
    let canon = serde_json::json!({
        "rank": rank,
        "simple_roots": simple_roots,
        "simple_coroots": simple_coroots,
    });
    fnv1a(canon.to_string().as_bytes())
}

/// FNV-1a; stable across runs and platforms, unlike the std hasher.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn cartan_of_type(type_str: &str) -> Result<Vec<Vec<i64>>> {
    let mut blocks: Vec<Vec<Vec<i64>>> = Vec::new();
    for part in type_str.split(['x', '*']) {
        blocks.push(cartan_of_simple_type(part.trim())?);
    }
    let total: usize = blocks.iter().map(|b| b.len()).sum();
    let mut cartan = vec![vec![0i64; total]; total];
    let mut off = 0;
    for b in blocks {
        let n = b.len();
        for i in 0..n {
            for j in 0..n {
                cartan[off + i][off + j] = b[i][j];
            }
        }
        off += n;
    }
    Ok(cartan)
}

/// Cartan matrices in Bourbaki numbering, `A_ij = <α_i∨, α_j>`.
fn cartan_of_simple_type(name: &str) -> Result<Vec<Vec<i64>>> {
    let err = || Error::Validation(format!("unknown root system type '{name}'"));
    if name.len() < 2 {
        return Err(err());
    }
    let (letter, num) = name.split_at(1);
    let n: usize = num.parse().map_err(|_| err())?;
    if n == 0 {
        return Err(err());
    }
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
    }
    fn chain(a: &mut [Vec<i64>], i: usize, j: usize) {
        a[i][j] = -1;
        a[j][i] = -1;
    }
    match letter {
        "A" => {
            for i in 1..n {
                chain(&mut a, i - 1, i);
            }
        }
        "B" => {
            // α_n is the short root: <α_{n-1}∨, α_n> = -1, <α_n∨, α_{n-1}> = -2.
            if n < 2 {
                return Err(err());
            }
            for i in 1..n - 1 {
                chain(&mut a, i - 1, i);
            }
            a[n - 2][n - 1] = -1;
            a[n - 1][n - 2] = -2;
        }
        "C" => {
            // α_n is the long root.
            if n < 2 {
                return Err(err());
            }
            for i in 1..n - 1 {
                chain(&mut a, i - 1, i);
            }
            a[n - 2][n - 1] = -2;
            a[n - 1][n - 2] = -1;
        }
        "D" => {
            if n < 3 {
                return Err(err());
            }
            for i in 1..n - 1 {
                chain(&mut a, i - 1, i);
            }
            chain(&mut a, n - 3, n - 1);
        }
        "E" => {
            if !(6..=8).contains(&n) {
                return Err(err());
            }
            // Bourbaki: node 2 attaches to node 4; chain 1-3-4-5-...-n.
            chain(&mut a, 0, 2);
            chain(&mut a, 1, 3);
            chain(&mut a, 2, 3);
            for i in 4..n {
                chain(&mut a, i - 1, i);
            }
        }
        "F" => {
            if n != 4 {
                return Err(err());
            }
            chain(&mut a, 0, 1);
            a[1][2] = -2;
            a[2][1] = -1;
            chain(&mut a, 2, 3);
        }
        "G" => {
            if n != 2 {
                return Err(err());
            }
            // α_1 short, α_2 long.
            a[0][1] = -3;
            a[1][0] = -1;
        }
        _ => return Err(err()),
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// datum file format

/// On-disk datum specification: either a named type plus isogeny or explicit
/// matrices (the two are mutually exclusive).
#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum DatumSpecFile {
    Named {
        #[serde(rename = "type")]
        type_str: String,
        isogeny: Isogeny,
    },
    Explicit {
        rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
    },
}

pub fn datum_from_json(text: &str) -> Result<Arc<RootDatum>> {
    let spec: DatumSpecFile =
        serde_json::from_str(text).map_err(|e| Error::DataFile(format!("bad datum file: {e}")))?;
    match spec {
        DatumSpecFile::Named { type_str, isogeny } => RootDatum::from_type(&type_str, isogeny),
        DatumSpecFile::Explicit { rank, simple_roots, simple_coroots } => {
            RootDatum::from_matrices(rank, simple_roots, simple_coroots)
        }
    }
}
