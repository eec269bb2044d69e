//! Affine-root evaluation, fundamental alcoves, fundamental domains for the
//! level-`l` actions, and facet stabilizers.
//!
//! The closed fundamental alcove at level `n` is
//! `ā_n = {v : -n <= <v,α> <= 0 for all α > 0}`; its negative
//! `(-ā_n) = {v : 0 <= <v,α> <= n}` is the fundamental domain used to index
//! `μ_n`-fixed-point components, and the shifted band
//! `C̄_l = {λ : 0 <= <λ+ρ∨,α> <= l}` is the one for the dot action.
//!
//! All points carry exact rational coordinates (integer numerators over one
//! denominator); wall membership is never approximate.

use num::integer::gcd;
use num::rational::Ratio;

use crate::affine::{ActionMode, AffineWeylElt, WaffGroup};
use crate::matrix::solve_rational;
use crate::rootdata::RootDatum;
use crate::{Error, Result};

/// A point of `X∨ ⊗ Q`: integer numerators over a single positive
/// denominator, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatPoint {
    num: Vec<i64>,
    den: i64,
}

impl RatPoint {
    pub fn new(num: Vec<i64>, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let mut p = RatPoint { num, den };
        p.normalize();
        p
    }

    pub fn from_coweight(v: &[i64]) -> Self {
        RatPoint { num: v.to_vec(), den: 1 }
    }

    fn normalize(&mut self) {
        if self.den < 0 {
            self.den = -self.den;
            for c in self.num.iter_mut() {
                *c = -*c;
            }
        }
        let g = self.num.iter().fold(self.den, |acc, &c| gcd(acc, c.abs()));
        if g > 1 {
            self.den /= g;
            for c in self.num.iter_mut() {
                *c /= g;
            }
        }
    }

    pub fn numerators(&self) -> &[i64] {
        &self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// `<v, α>` as an exact rational.
    pub fn pair(&self, alpha: &[i64]) -> Ratio<i64> {
        Ratio::new(dot(&self.num, alpha), self.den)
    }

    pub fn as_coweight(&self) -> Option<Vec<i64>> {
        (self.den == 1).then(|| self.num.clone())
    }
}

/// A formal affine root `α + m·ħ` with `α` a (possibly negative) root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineRoot {
    alpha: Vec<i64>,
    m: i64,
}

impl AffineRoot {
    /// Builds `α + mħ`, checking that `α` is a root of the datum.
    pub fn new(datum: &RootDatum, alpha: Vec<i64>, m: i64) -> Result<Self> {
        if datum.classify_root(&alpha).is_none() {
            return Err(Error::Validation("α is not a root of this datum".into()));
        }
        Ok(AffineRoot { alpha, m })
    }

    pub fn from_positive_index(datum: &RootDatum, index: usize, m: i64) -> Self {
        AffineRoot { alpha: datum.positive_roots()[index].clone(), m }
    }

    pub fn alpha(&self) -> &[i64] {
        &self.alpha
    }

    pub fn m(&self) -> i64 {
        self.m
    }
}

/// `f^n_{α+mħ}(v) = <α, v> + n·m`, exactly.
pub fn eval_affine_root(a: &AffineRoot, v: &RatPoint, n: i64) -> Ratio<i64> {
    v.pair(&a.alpha) + Ratio::from_integer(n * a.m)
}

/// `s_{α+mħ} ·_n v = v - f^n_{α+mħ}(v) α∨`. Fixed points are exactly the
/// zero set of `f^n`.
pub fn reflect(datum: &RootDatum, a: &AffineRoot, v: &RatPoint, n: i64) -> RatPoint {
    let (idx, sign) = datum
        .classify_root(&a.alpha)
        .expect("AffineRoot must hold a root of the datum");
    let alpha_v: Vec<i64> = datum.positive_coroots()[idx].iter().map(|&c| sign * c).collect();
    // f(v) = (dot(num, α) + n m den) / den
    let f_num = dot(v.numerators(), &a.alpha) + n * a.m * v.denominator();
    let num: Vec<i64> = v
        .numerators()
        .iter()
        .zip(&alpha_v)
        .map(|(&c, &av)| c - f_num * av)
        .collect();
    RatPoint::new(num, v.denominator())
}

/// Membership in the closed fundamental alcove
/// `ā_n = {v : -n <= <v,α> <= 0 for all α in R+}`.
pub fn in_closed_fundamental_alcove(datum: &RootDatum, v: &RatPoint, n: i64) -> bool {
    datum.positive_roots().iter().all(|alpha| {
        let p = v.pair(alpha);
        Ratio::from_integer(-n) <= p && p <= Ratio::from_integer(0)
    })
}

/// Lattice points of the band `{λ : lo_i <= <λ, α_i> <= hi_i}` over the
/// simple roots, filtered by `extra`; requires a semisimple datum.
fn enumerate_lattice_band(
    datum: &RootDatum,
    lo: &[i64],
    hi: &[i64],
    extra: impl Fn(&[i64]) -> bool,
) -> Result<Vec<Vec<i64>>> {
    if !datum.is_semisimple() {
        return Err(Error::Validation(
            "fundamental-domain enumeration requires a semisimple root datum".into(),
        ));
    }
    let r = datum.rank();
    // λ = P^{-1} p where P rows are the simple roots; bound each coordinate
    // of λ over the p-box by interval arithmetic on the exact inverse.
    let p_rows: Vec<Vec<i64>> = datum.simple_roots().to_vec();
    let mut inv_cols: Vec<(Vec<i128>, i128)> = Vec::with_capacity(r);
    for j in 0..r {
        let mut e = vec![0i64; r];
        e[j] = 1;
        let col = solve_rational(&p_rows, &e)
            .ok_or_else(|| Error::Invariant("simple roots do not span (not semisimple?)".into()))?;
        inv_cols.push(col);
    }
    let mut lo_c = vec![0i64; r];
    let mut hi_c = vec![0i64; r];
    for coord in 0..r {
        let mut lo_acc = Ratio::<i128>::from_integer(0);
        let mut hi_acc = Ratio::<i128>::from_integer(0);
        for (i, (nums, den)) in inv_cols.iter().enumerate() {
            let q = Ratio::new(nums[coord], *den);
            let (a, b) = (q * Ratio::from_integer(lo[i] as i128), q * Ratio::from_integer(hi[i] as i128));
            lo_acc += a.min(b);
            hi_acc += a.max(b);
        }
        lo_c[coord] = lo_acc.floor().to_integer() as i64;
        hi_c[coord] = hi_acc.ceil().to_integer() as i64;
    }

    let mut out = Vec::new();
    let mut cur = lo_c.clone();
    'scan: loop {
        let ok = (0..r).all(|i| {
            let p = dot(&cur, &datum.simple_roots()[i]);
            lo[i] <= p && p <= hi[i]
        });
        if ok && extra(&cur) {
            out.push(cur.clone());
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == r {
                break 'scan;
            }
            if cur[i] < hi_c[i] {
                cur[i] += 1;
                cur[..i].copy_from_slice(&lo_c[..i]);
                continue 'scan;
            }
            i += 1;
        }
    }
    out.sort();
    Ok(out)
}

/// `(-ā_l) ∩ X∨ = {μ : 0 <= <μ,α> <= l for all α > 0}`, the index set of the
/// fixed-point components.
pub fn box_fundamental_reps(datum: &RootDatum, ell: i64) -> Result<Vec<Vec<i64>>> {
    check_level(ell)?;
    let r = datum.num_simple();
    let highest: Vec<usize> = datum.components().iter().map(|c| c.highest_root).collect();
    enumerate_lattice_band(datum, &vec![0; r], &vec![ell; r], |lam| {
        highest
            .iter()
            .all(|&h| dot(lam, &datum.positive_roots()[h]) <= ell)
    })
}

/// `C̄_l ∩ X∨ = {λ : 0 <= <λ+ρ∨,α> <= l}`, the block representatives.
pub fn dot_fundamental_reps(datum: &RootDatum, ell: i64) -> Result<Vec<Vec<i64>>> {
    check_level(ell)?;
    let rho = datum.rho_check()?;
    let r = datum.num_simple();
    // <λ, α_i> ∈ [-1, l-1] since <ρ∨, α_i> = 1.
    let highest: Vec<usize> = datum.components().iter().map(|c| c.highest_root).collect();
    enumerate_lattice_band(datum, &vec![-1; r], &vec![ell - 1; r], |lam| {
        highest.iter().all(|&h| {
            let beta = &datum.positive_roots()[h];
            dot(lam, beta) + dot(&rho, beta) <= ell
        })
    })
}

fn check_level(ell: i64) -> Result<()> {
    if ell < 1 {
        return Err(Error::Validation("level must be a positive integer".into()));
    }
    Ok(())
}

/// Projects `μ` to the fundamental domain of the requested action at level
/// `l`, returning the representative and a witness `w` with
/// `act(w, rep) = μ`.
///
/// The walk reflects across the nearest violated wall of the first
/// out-of-band positive root, in canonical root order; each step strictly
/// decreases the invariant-form distance to an interior point of the band,
/// which is a decreasing integer potential after clearing denominators.
pub fn project_to_fundamental(
    group: &WaffGroup,
    mu: &[i64],
    ell: i64,
    mode: ActionMode,
) -> Result<(Vec<i64>, AffineWeylElt)> {
    check_level(ell)?;
    let datum = group.datum().clone();
    if !datum.is_semisimple() {
        return Err(Error::Validation("projection requires a semisimple root datum".into()));
    }
    match mode {
        ActionMode::Box => project_box(group, mu, ell),
        ActionMode::Dot => {
            let rho = datum.rho_check()?;
            let shifted: Vec<i64> = mu.iter().zip(&rho).map(|(&a, &b)| a + b).collect();
            let (rep_box, witness) = project_box(group, &shifted, ell)?;
            let rep: Vec<i64> = rep_box.iter().zip(&rho).map(|(&a, &b)| a - b).collect();
            debug_assert_eq!(group.act(&witness, &rep, ell, ActionMode::Dot), mu);
            Ok((rep, witness))
        }
        ActionMode::Cdot => {
            // ·_l differs from □_l by a global sign: w ·_l μ = -(w □_l (-μ)).
            let neg: Vec<i64> = mu.iter().map(|&c| -c).collect();
            let (rep_box, witness) = project_box(group, &neg, ell)?;
            let rep: Vec<i64> = rep_box.iter().map(|&c| -c).collect();
            debug_assert_eq!(group.act(&witness, &rep, ell, ActionMode::Cdot), mu);
            Ok((rep, witness))
        }
    }
}

fn project_box(group: &WaffGroup, mu: &[i64], ell: i64) -> Result<(Vec<i64>, AffineWeylElt)> {
    let datum = group.datum().clone();
    let mut cur = mu.to_vec();
    let mut witness = group.identity();
    let mut steps = 0u64;
    'outer: loop {
        for (i, alpha) in datum.positive_roots().iter().enumerate() {
            let p = dot(&cur, alpha);
            if (0..=ell).contains(&p) {
                continue;
            }
            // Nearest violated wall <·,α> = l·m strictly between the band
            // and the current point.
            let m = if p < 0 { p.div_euclid(ell) + 1 } else { (p - 1).div_euclid(ell) };
            let c = p - ell * m;
            let alpha_v = &datum.positive_coroots()[i];
            for (x, &av) in cur.iter_mut().zip(alpha_v) {
                *x -= c * av;
            }
            witness = group.multiply(&witness, &group.reflection(i, m));
            steps += 1;
            if steps > 10_000_000 {
                return Err(Error::Invariant("fundamental-domain walk failed to terminate".into()));
            }
            continue 'outer;
        }
        break;
    }
    debug_assert_eq!(group.act(&witness, &cur, ell, ActionMode::Box), mu);
    Ok((cur, witness))
}

/// Parahoric kind of a fixed-point component: `thin` when the facet
/// stabilizer is the full finite Weyl group, `full` when it is trivial.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacetKind {
    Thin,
    Full,
    Partial,
}

/// The facet of `ā_l` containing `-λ`, together with its pointwise
/// stabilizer data.
#[derive(Clone, Debug)]
pub struct FacetDescriptor {
    /// The point `-λ` whose facet is described.
    pub base_point: RatPoint,
    /// The level `l`.
    pub level: i64,
    /// Walls through the base point: pairs `(positive root index, m)` with
    /// `f^l_{α+mħ}(-λ) = 0`.
    pub vanishing: Vec<(usize, i64)>,
    /// Order of the subgroup generated by the vanishing reflections.
    pub stabilizer_order: u64,
    pub kind: FacetKind,
}

impl FacetDescriptor {
    pub fn vanishing_roots(&self, datum: &RootDatum) -> Vec<AffineRoot> {
        self.vanishing
            .iter()
            .map(|&(i, m)| AffineRoot::from_positive_index(datum, i, m))
            .collect()
    }

    /// The stabilizer generators as affine reflections `s_{α+mħ}`.
    pub fn stabilizer_generators(&self, group: &WaffGroup) -> Vec<AffineWeylElt> {
        self.vanishing.iter().map(|&(i, m)| group.reflection(i, m)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "base_point": {"num": self.base_point.numerators(), "den": self.base_point.denominator()},
            "level": self.level,
            "vanishing": self.vanishing.iter().map(|&(i, m)| serde_json::json!([i, m])).collect::<Vec<_>>(),
            "stabilizer_order": self.stabilizer_order,
            "kind": self.kind,
        })
    }
}

/// Stabilizer data of the facet containing `-λ`, for `λ` in the box
/// fundamental set.
pub fn facet_stabilizer(group: &WaffGroup, lambda: &[i64], ell: i64) -> Result<FacetDescriptor> {
    check_level(ell)?;
    let datum = group.datum().clone();
    let in_box = datum
        .positive_roots()
        .iter()
        .all(|alpha| (0..=ell).contains(&dot(lambda, alpha)));
    if !in_box {
        return Err(Error::Validation(
            "facet stabilizers are computed at box-fundamental representatives only".into(),
        ));
    }
    // f^l_{α+mħ}(-λ) = -<λ,α> + l·m vanishes iff l | <λ,α>, with m = <λ,α>/l.
    let mut vanishing = Vec::new();
    for (i, alpha) in datum.positive_roots().iter().enumerate() {
        let p = dot(lambda, alpha);
        if p % ell == 0 {
            vanishing.push((i, p / ell));
        }
    }
    let gens: Vec<AffineWeylElt> =
        vanishing.iter().map(|&(i, m)| group.reflection(i, m)).collect();
    let stabilizer_order = group.subgroup_order(&gens, 100_000)?;
    let thin = datum
        .simple_roots()
        .iter()
        .all(|alpha| dot(lambda, alpha) == 0);
    let kind = if thin {
        FacetKind::Thin
    } else if vanishing.is_empty() {
        FacetKind::Full
    } else {
        FacetKind::Partial
    };
    let base_point = RatPoint::from_coweight(&lambda.iter().map(|&c| -c).collect::<Vec<_>>());
    Ok(FacetDescriptor { base_point, level: ell, vanishing, stabilizer_order, kind })
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Isogeny;
    use std::sync::Arc;

    fn setup(t: &str) -> (Arc<RootDatum>, Arc<WaffGroup>) {
        let d = RootDatum::from_type(t, Isogeny::Adjoint).unwrap();
        let g = WaffGroup::new(d.clone()).unwrap();
        (d, g)
    }

    #[test]
    fn eval_examples() {
        let (d, _) = setup("A1");
        let a0 = AffineRoot::new(&d, vec![1], 0).unwrap();
        let a1 = AffineRoot::new(&d, vec![1], 1).unwrap();
        assert_eq!(eval_affine_root(&a0, &RatPoint::from_coweight(&[0]), 3), 0.into());
        assert_eq!(eval_affine_root(&a1, &RatPoint::from_coweight(&[-3]), 3), 0.into());
        assert_eq!(eval_affine_root(&a0, &RatPoint::from_coweight(&[-2]), 3), (-2).into());
        assert!(AffineRoot::new(&d, vec![3], 0).is_err());
    }

    #[test]
    fn reflect_examples() {
        let (d, g) = setup("A1");
        let a0 = AffineRoot::new(&d, vec![1], 0).unwrap();
        // v on the wall stays put
        let wall = RatPoint::from_coweight(&[0]);
        assert_eq!(reflect(&d, &a0, &wall, 3), wall);
        // reflect(α+0ħ, -2) = -2 - (-2)·2 = 2
        assert_eq!(reflect(&d, &a0, &RatPoint::from_coweight(&[-2]), 3), RatPoint::from_coweight(&[2]));
        // agrees with the ·_n action of s_{α+mħ} (119 sample pairs)
        for m in -3..4i64 {
            let s = g.reflection(0, m);
            for v in -8..9i64 {
                let via_reflect =
                    reflect(&d, &AffineRoot::new(&d, vec![1], m).unwrap(), &RatPoint::from_coweight(&[v]), 3);
                let via_act = g.act(&s, &[v], 3, ActionMode::Cdot);
                assert_eq!(via_reflect, RatPoint::from_coweight(&via_act));
            }
        }
    }

    #[test]
    fn closed_alcove_membership() {
        let (d, _) = setup("A1");
        assert!(in_closed_fundamental_alcove(&d, &RatPoint::from_coweight(&[0]), 3));
        assert!(in_closed_fundamental_alcove(&d, &RatPoint::from_coweight(&[-3]), 3));
        assert!(!in_closed_fundamental_alcove(&d, &RatPoint::from_coweight(&[-4]), 3));
        let (a2, _) = setup("A2");
        assert!(in_closed_fundamental_alcove(&a2, &RatPoint::from_coweight(&[0, 0]), 2));
    }

    #[test]
    fn fundamental_reps_a1() {
        let (d, _) = setup("A1");
        assert_eq!(box_fundamental_reps(&d, 3).unwrap(), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(box_fundamental_reps(&d, 2).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(dot_fundamental_reps(&d, 3).unwrap(), vec![vec![-1], vec![0], vec![1], vec![2]]);
        assert_eq!(dot_fundamental_reps(&d, 2).unwrap(), vec![vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn fundamental_reps_shift_and_counts() {
        for (t, ell, expected) in [("A2", 2i64, 6usize), ("A2", 3, 10), ("B2", 2, 6)] {
            let (d, _) = setup(t);
            let dots = dot_fundamental_reps(&d, ell).unwrap();
            let boxes = box_fundamental_reps(&d, ell).unwrap();
            assert_eq!(dots.len(), boxes.len());
            if t == "A2" && ell == 2 {
                assert_eq!(dots.len(), expected);
            }
            let rho = d.rho_check().unwrap();
            let shifted: Vec<Vec<i64>> = dots
                .iter()
                .map(|l| l.iter().zip(&rho).map(|(&a, &b)| a + b).collect())
                .collect();
            assert_eq!(shifted, boxes, "(dot reps) + ρ∨ = (box reps) for {t}");
        }
    }

    #[test]
    fn sc_datum_is_rejected_for_dot_reps() {
        let d = RootDatum::from_type("A1", Isogeny::SimplyConnected).unwrap();
        assert!(dot_fundamental_reps(&d, 3).is_err(), "ρ∨ is not integral");
    }

    #[test]
    fn projection_examples() {
        let (_, g) = setup("A1");
        // already fundamental
        let (rep, w) = project_to_fundamental(&g, &[1], 3, ActionMode::Box).unwrap();
        assert_eq!((rep.as_slice(), w.is_identity()), ([1].as_slice(), true));
        // dot: μ = 4 → rep 0 with w •_3 0 = 4
        let (rep, w) = project_to_fundamental(&g, &[4], 3, ActionMode::Dot).unwrap();
        assert_eq!(rep, vec![0]);
        assert_eq!(g.act(&w, &[0], 3, ActionMode::Dot), vec![4]);
        // box: μ = 7 → rep 1 with w □_3 1 = 7
        let (rep, w) = project_to_fundamental(&g, &[7], 3, ActionMode::Box).unwrap();
        assert_eq!(rep, vec![1]);
        assert_eq!(g.act(&w, &[1], 3, ActionMode::Box), vec![7]);
    }

    #[test]
    fn projection_partition_property() {
        // Every coweight in a radius-2l box hits exactly one representative,
        // and the representative is reproduced by the witness.
        for t in ["A1", "A2"] {
            for ell in [2i64, 3] {
                let (d, g) = setup(t);
                let reps_box = box_fundamental_reps(&d, ell).unwrap();
                let reps_dot = dot_fundamental_reps(&d, ell).unwrap();
                let radius = 2 * ell;
                let points = lattice_box(d.rank(), radius);
                for p in &points {
                    let (rb, wb) = project_to_fundamental(&g, p, ell, ActionMode::Box).unwrap();
                    assert!(reps_box.contains(&rb));
                    assert_eq!(g.act(&wb, &rb, ell, ActionMode::Box), *p);
                    let (rd, wd) = project_to_fundamental(&g, p, ell, ActionMode::Dot).unwrap();
                    assert!(reps_dot.contains(&rd));
                    assert_eq!(g.act(&wd, &rd, ell, ActionMode::Dot), *p);
                }
            }
        }
    }

    fn lattice_box(rank: usize, radius: i64) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..rank {
            let mut next = Vec::new();
            for v in out {
                for c in -radius..=radius {
                    let mut v2 = v.clone();
                    v2.push(c);
                    next.push(v2);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn facet_stabilizer_examples() {
        let (_, g) = setup("A1");
        let f0 = facet_stabilizer(&g, &[0], 3).unwrap();
        assert_eq!(f0.stabilizer_order, 2);
        assert_eq!(f0.kind, FacetKind::Thin);
        assert_eq!(f0.vanishing, vec![(0, 0)]);

        let f1 = facet_stabilizer(&g, &[1], 3).unwrap();
        assert_eq!(f1.stabilizer_order, 1);
        assert_eq!(f1.kind, FacetKind::Full);
        assert!(f1.vanishing.is_empty());

        let f3 = facet_stabilizer(&g, &[3], 3).unwrap();
        assert_eq!(f3.stabilizer_order, 2);
        assert_eq!(f3.kind, FacetKind::Partial);
        assert_eq!(f3.vanishing, vec![(0, 1)], "wall α + 1ħ vanishes at -3");

        assert!(facet_stabilizer(&g, &[4], 3).is_err(), "4 is not box-fundamental at l = 3");
    }
}
