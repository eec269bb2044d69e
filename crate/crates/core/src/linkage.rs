//! Blocks of the coweight lattice under the dot action at level `l`, their
//! dominant-weight enumeration, and the dictionary matching blocks to
//! `μ_l`-fixed-point components.
//!
//! A block is keyed by its representative in `C̄_l ∩ X∨`; this is a
//! `W_aff`-orbit, the loose sense of "block" (true linkage classes can be
//! coarser). Components are keyed by `(-ā_l) ∩ X∨`; for adjoint data the two
//! index sets match under `λ -> λ + ρ∨` with equal stabilizer orders.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affine::{ActionMode, AffineWeylElt, WaffGroup};
use crate::alcove::{
    box_fundamental_reps, dot_fundamental_reps, facet_stabilizer, project_to_fundamental,
    FacetKind,
};
use crate::rootdata::RootDatum;
use crate::{Error, Result};

/// A root datum together with the characteristic parameter `l >= 2`
/// (primality is not enforced).
pub struct LinkageContext {
    datum: Arc<RootDatum>,
    group: Arc<WaffGroup>,
    ell: i64,
}

impl LinkageContext {
    pub fn new(datum: Arc<RootDatum>, ell: i64) -> Result<LinkageContext> {
        if ell < 2 {
            return Err(Error::Validation("the characteristic parameter l must be >= 2".into()));
        }
        let group = WaffGroup::new(datum.clone())?;
        Ok(LinkageContext { datum, group, ell })
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn group(&self) -> &Arc<WaffGroup> {
        &self.group
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }
}

/// A `•_l`-orbit, keyed by its representative in `C̄_l ∩ X∨`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Block {
    /// Representative `λ ∈ C̄_l ∩ X∨`.
    pub rep: Vec<i64>,
    /// Generator indices `s` with `s •_l λ = λ`.
    pub i_lambda: Vec<usize>,
    /// Order of the stabilizer `W_λ = <I_λ>`.
    pub stabilizer_order: u64,
}

impl Block {
    pub fn is_regular(&self) -> bool {
        self.i_lambda.is_empty()
    }
}

/// One connected component of the `μ_l`-fixed points, indexed by
/// `λ ∈ (-ā_l) ∩ X∨`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentDescriptor {
    /// Index `λ ∈ (-ā_l) ∩ X∨`.
    pub index: Vec<i64>,
    pub stabilizer_order: u64,
    pub kind: FacetKind,
}

/// The block containing `μ`.
pub fn block_of(ctx: &LinkageContext, mu: &[i64]) -> Result<Block> {
    let (rep, _) = project_to_fundamental(ctx.group(), mu, ctx.ell(), ActionMode::Dot)?;
    block_at_rep(ctx, rep)
}

fn block_at_rep(ctx: &LinkageContext, rep: Vec<i64>) -> Result<Block> {
    let g = ctx.group();
    let i_lambda: Vec<usize> = (0..g.num_generators())
        .filter(|&i| g.act(&g.generators()[i], &rep, ctx.ell(), ActionMode::Dot) == rep)
        .collect();
    let gens: Vec<AffineWeylElt> = i_lambda.iter().map(|&i| g.generators()[i].clone()).collect();
    let stabilizer_order = g.subgroup_order(&gens, 100_000)?;
    Ok(Block { rep, i_lambda, stabilizer_order })
}

/// All blocks, ordered by representative.
pub fn all_blocks(ctx: &LinkageContext) -> Result<Vec<Block>> {
    dot_fundamental_reps(ctx.datum(), ctx.ell())?
        .into_iter()
        .map(|rep| block_at_rep(ctx, rep))
        .collect()
}

/// Membership test for `W_aff^{(λ)}`: maximal in `w W_λ` and minimal in
/// `W_f w`.
pub fn in_w_aff_lambda(ctx: &LinkageContext, block: &Block, w: &AffineWeylElt) -> Result<bool> {
    let g = ctx.group();
    if !g.is_min_in_wf(w) {
        return Ok(false);
    }
    Ok(&g.max_in_coset(w, &block.i_lambda)? == w)
}

/// The elements of `W_aff^{(λ)}` up to the length cap with their dominant
/// weights `w •_l λ`, ordered by (length, canonical element order).
///
/// `w -> w •_l λ` restricted to `W_aff^{(λ)}` is a bijection onto
/// `(W_aff •_l λ) ∩ X∨_+`; distinctness and dominance are enforced.
pub fn block_dominant_weights(
    ctx: &LinkageContext,
    block: &Block,
    max_len: u32,
) -> Result<Vec<(AffineWeylElt, Vec<i64>)>> {
    let g = ctx.group();
    let mut out = Vec::new();
    for w in g.enumerate_ball(max_len) {
        if !in_w_aff_lambda(ctx, block, &w)? {
            continue;
        }
        let weight = g.act(&w, &block.rep, ctx.ell(), ActionMode::Dot);
        if !ctx.datum().is_dominant(&weight) {
            return Err(Error::Invariant(format!(
                "W_aff^(λ) element of word {:?} produced a non-dominant weight",
                g.word(&w)
            )));
        }
        out.push((w, weight));
    }
    let mut weights: Vec<&Vec<i64>> = out.iter().map(|(_, wgt)| wgt).collect();
    weights.sort();
    weights.dedup();
    if weights.len() != out.len() {
        return Err(Error::Invariant("block weight bijection produced a repeat".into()));
    }
    Ok(out)
}

/// The census of `μ_l`-fixed-point components, indexed by the box
/// fundamental set.
pub fn fixed_point_components(ctx: &LinkageContext) -> Result<Vec<ComponentDescriptor>> {
    box_fundamental_reps(ctx.datum(), ctx.ell())?
        .into_iter()
        .map(|index| {
            let f = facet_stabilizer(ctx.group(), &index, ctx.ell())?;
            Ok(ComponentDescriptor {
                index,
                stabilizer_order: f.stabilizer_order,
                kind: f.kind,
            })
        })
        .collect()
}

/// The component containing the `T`-fixed point of `μ`, with a coset witness
/// `w` such that `w □_l λ = μ`.
pub fn component_of_weight(
    ctx: &LinkageContext,
    mu: &[i64],
) -> Result<(Vec<i64>, AffineWeylElt)> {
    project_to_fundamental(ctx.group(), mu, ctx.ell(), ActionMode::Box)
}

/// One row of the blocks-versus-components dictionary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DictEntry {
    pub block_rep: Vec<i64>,
    pub block_stabilizer_order: u64,
    pub component_index: Vec<i64>,
    pub component_stabilizer_order: u64,
    pub kind: FacetKind,
}

/// The `λ <-> λ + ρ∨` bijection between block representatives and component
/// indices, with stabilizer orders on both sides.
pub fn blocks_vs_components_dictionary(ctx: &LinkageContext) -> Result<Vec<DictEntry>> {
    let rho = ctx.datum().rho_check()?;
    let blocks = all_blocks(ctx)?;
    let components = fixed_point_components(ctx)?;
    if blocks.len() != components.len() {
        return Err(Error::Invariant("block and component counts differ".into()));
    }
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        let target: Vec<i64> = block.rep.iter().zip(&rho).map(|(&a, &b)| a + b).collect();
        let comp = components
            .iter()
            .find(|c| c.index == target)
            .ok_or_else(|| Error::Invariant("ρ∨-shift of a block rep is not a component index".into()))?;
        out.push(DictEntry {
            block_rep: block.rep,
            block_stabilizer_order: block.stabilizer_order,
            component_index: comp.index.clone(),
            component_stabilizer_order: comp.stabilizer_order,
            kind: comp.kind,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::Isogeny;

    fn ctx(t: &str, ell: i64) -> LinkageContext {
        LinkageContext::new(RootDatum::from_type(t, Isogeny::Adjoint).unwrap(), ell).unwrap()
    }

    #[test]
    fn block_examples_a1() {
        let c = ctx("A1", 3);
        let b0 = block_of(&c, &[0]).unwrap();
        assert_eq!(b0.rep, vec![0]);
        assert!(b0.is_regular(), "s1•0 = -2 and s0•0 = 4, so 0 is regular");
        assert_eq!(b0.stabilizer_order, 1);

        let bm1 = block_of(&c, &[-1]).unwrap();
        assert_eq!(bm1.rep, vec![-1]);
        assert_eq!(bm1.i_lambda, vec![0], "s1 fixes -1 under •_3");
        assert_eq!(bm1.stabilizer_order, 2);

        let b10 = block_of(&c, &[10]).unwrap();
        assert_eq!(b10.rep, vec![0], "10 lies in the orbit of 0");
    }

    #[test]
    fn dominant_weights_of_regular_block() {
        let c = ctx("A1", 3);
        let b0 = block_of(&c, &[0]).unwrap();
        let ws = block_dominant_weights(&c, &b0, 8).unwrap();
        let weights: Vec<i64> = ws.iter().map(|(_, w)| w[0]).filter(|&w| w <= 12).collect();
        assert_eq!(weights, vec![0, 4, 6, 10, 12]);
        // w = e gives λ itself
        assert!(ws[0].0.is_identity());
        assert_eq!(ws[0].1, vec![0]);
    }

    #[test]
    fn dominant_weights_of_singular_block_match_orbit_oracle() {
        let c = ctx("A1", 3);
        let b = block_of(&c, &[-1]).unwrap();
        let ws = block_dominant_weights(&c, &b, 8).unwrap();
        let got: Vec<i64> = ws.iter().map(|(_, w)| w[0]).collect();
        // Brute-force dot-orbit of -1 intersected with the dominant cone:
        // ±(0 + 6k) - 1 = {..., -7, -1, 5, 11, ...}.
        let mut oracle: Vec<i64> = Vec::new();
        for k in -6i64..7 {
            for sign in [1i64, -1] {
                let v = sign * 6 * k - 1;
                if v >= 0 && !oracle.contains(&v) {
                    oracle.push(v);
                }
            }
        }
        oracle.sort_unstable();
        let bound = got.iter().copied().max().unwrap();
        let oracle: Vec<i64> = oracle.into_iter().filter(|&v| v <= bound).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn component_census_a1() {
        let c3 = ctx("A1", 3);
        let comps = fixed_point_components(&c3).unwrap();
        let kinds: Vec<FacetKind> = comps.iter().map(|c| c.kind).collect();
        assert_eq!(comps.len(), 4);
        assert_eq!(
            kinds,
            vec![FacetKind::Thin, FacetKind::Full, FacetKind::Full, FacetKind::Partial]
        );

        let c2 = ctx("A1", 2);
        let kinds2: Vec<FacetKind> =
            fixed_point_components(&c2).unwrap().iter().map(|c| c.kind).collect();
        assert_eq!(kinds2, vec![FacetKind::Thin, FacetKind::Full, FacetKind::Partial]);
    }

    #[test]
    fn component_count_equals_block_count_a2() {
        let c = ctx("A2", 2);
        assert_eq!(
            fixed_point_components(&c).unwrap().len(),
            all_blocks(&c).unwrap().len()
        );
    }

    #[test]
    fn component_of_weight_examples() {
        let c = ctx("A1", 3);
        // μ already a box representative
        let (l, w) = component_of_weight(&c, &[2]).unwrap();
        assert_eq!((l, w.is_identity()), (vec![2], true));
        // μ = 6 → (0, w) with w □_3 0 = 0 + 3·2 = 6; t_{α∨} is one such witness
        let (l, w) = component_of_weight(&c, &[6]).unwrap();
        assert_eq!(l, vec![0]);
        assert_eq!(c.group().act(&w, &[0], 3, ActionMode::Box), vec![6]);
        let t = c.group().translation(&[2]).unwrap();
        assert_eq!(c.group().act(&t, &[0], 3, ActionMode::Box), vec![6]);
        // μ = -2 → (2, w) with w □_3 2 = -2
        let (l, w) = component_of_weight(&c, &[-2]).unwrap();
        assert_eq!(l, vec![2]);
        assert_eq!(c.group().act(&w, &[2], 3, ActionMode::Box), vec![-2]);
    }

    #[test]
    fn dictionary_a1() {
        let c = ctx("A1", 3);
        let dict = blocks_vs_components_dictionary(&c).unwrap();
        let pairs: Vec<(i64, i64)> =
            dict.iter().map(|e| (e.block_rep[0], e.component_index[0])).collect();
        assert_eq!(pairs, vec![(-1, 0), (0, 1), (1, 2), (2, 3)]);
        for e in &dict {
            assert_eq!(e.block_stabilizer_order, e.component_stabilizer_order);
        }
        let c2 = ctx("A1", 2);
        assert_eq!(blocks_vs_components_dictionary(&c2).unwrap().len(), 3);
    }

    #[test]
    fn bijection_into_dominant_weights_is_injective() {
        let c = ctx("A2", 2);
        for block in all_blocks(&c).unwrap() {
            let ws = block_dominant_weights(&c, &block, 8).unwrap();
            let mut weights: Vec<Vec<i64>> = ws.iter().map(|(_, w)| w.clone()).collect();
            weights.sort();
            weights.dedup();
            assert_eq!(weights.len(), ws.len());
        }
    }
}
