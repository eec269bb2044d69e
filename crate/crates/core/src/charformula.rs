//! Character formulas: tilting characters from `l`-Kazhdan-Lusztig data,
//! weight-multiplicity expansion, and the reciprocity/inversion pair for
//! simple characters on the region `Y`.
//!
//! The tilting formula evaluates, in the Grothendieck group,
//!
//! ```text
//!   [T(w •_l λ)] = Σ_{y ∈ W_aff^{(λ)}} ln_{y,w}(1) · [N(y •_l λ)],
//! ```
//!
//! and the simple-character pair on a Bruhat ideal `Y ⊂ ᶠW_aff` reads
//!
//! ```text
//!   [∇(w •_l 0)] = Σ_{y ∈ Y} ln_{w,ŷ}(1) · [L(y •_l 0)]
//!   [L(w •_l 0)] = Σ_{y ∈ Y} (-1)^{l(w)+l(y)} h_{y,w}(1) · [∇(y •_l 0)]
//! ```
//!
//! where the hat map `y -> ŷ` is supplied as input data and the second line
//! assumes the `kl_fallback` regime (`ln = n`). The region `Y` itself is cut
//! out by `<w □_l ρ∨, α_0> < l(h-1)` with `α_0` the highest root; the member
//! list is checked to be an ideal in the Bruhat order restricted to `ᶠW`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::affine::{ActionMode, AffineWeylElt, WaffGroup};
use crate::hecke::{pcan_polynomial, KlTable, PCanTable};
use crate::linkage::{block_of, in_w_aff_lambda, Block, LinkageContext};

use crate::rootdata::{Character, RootDatum};
use crate::{Error, Result};

/// Which classes a [`CharacterExpr`] is written in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Basis {
    /// Induced modules `[N(μ)]`.
    Nabla,
    /// Simple modules `[L(μ)]`.
    Simple,
    /// Tilting modules `[T(μ)]`.
    Tilting,
}

impl Basis {
    pub fn tag(&self) -> &'static str {
        match self {
            Basis::Nabla => "N",
            Basis::Simple => "L",
            Basis::Tilting => "T",
        }
    }
}

/// A `Z`-linear combination of classes indexed by dominant coweights.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacterExpr {
    basis: Basis,
    coeffs: BTreeMap<Vec<i64>, i64>,
}

impl CharacterExpr {
    pub fn new(basis: Basis) -> Self {
        CharacterExpr { basis, coeffs: BTreeMap::new() }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn add(&mut self, weight: Vec<i64>, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.coeffs.entry(weight).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.coeffs.retain(|_, c| *c != 0);
        }
    }

    pub fn coeff(&self, weight: &[i64]) -> i64 {
        self.coeffs.get(weight).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, i64)> {
        self.coeffs.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|(w, c)| {
                    serde_json::json!({"basis": self.basis.tag(), "weight": w, "coeff": c})
                })
                .collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<CharacterExpr> {
        #[derive(serde::Deserialize)]
        struct Term {
            basis: String,
            weight: Vec<i64>,
            coeff: i64,
        }
        let terms: Vec<Term> = serde_json::from_value(value.clone())
            .map_err(|e| Error::DataFile(format!("bad character expression: {e}")))?;
        let basis = match terms.first().map(|t| t.basis.as_str()) {
            None | Some("N") => Basis::Nabla,
            Some("L") => Basis::Simple,
            Some("T") => Basis::Tilting,
            Some(other) => {
                return Err(Error::DataFile(format!("unknown basis tag '{other}'")))
            }
        };
        let mut expr = CharacterExpr::new(basis);
        for t in terms {
            if t.basis != basis.tag() {
                return Err(Error::DataFile("mixed basis tags in one expression".into()));
            }
            if t.coeff == 0 || expr.coeff(&t.weight) != 0 {
                return Err(Error::DataFile("zero or repeated term in expression".into()));
            }
            expr.add(t.weight, t.coeff);
        }
        Ok(expr)
    }
}

/// `[T(w •_l λ)]` in the nabla basis, per the tilting character formula.
///
/// `w` must lie in `W_aff^{(λ)}` (maximal in `w W_λ`, minimal in `W_f w`);
/// the sum runs over `y ∈ W_aff^{(λ)}` with `y <= w` and the coefficient of
/// the top term is 1.
pub fn tilting_character(
    ctx: &LinkageContext,
    block: &Block,
    w: &AffineWeylElt,
    table: &PCanTable,
    kl: &KlTable,
) -> Result<CharacterExpr> {
    if !in_w_aff_lambda(ctx, block, w)? {
        return Err(Error::Validation(
            "tilting characters are indexed by W_aff^(λ): maximal in wW_λ and minimal in W_f w"
                .into(),
        ));
    }
    let g = ctx.group();
    let mut expr = CharacterExpr::new(Basis::Nabla);
    for y in g.enumerate_ball(w.length()) {
        if !in_w_aff_lambda(ctx, block, &y)? || !g.bruhat_leq(&y, w) {
            continue;
        }
        let coeff = pcan_polynomial(table, kl, &y, w)?.eval_at_one();
        let weight = g.act(&y, &block.rep, ctx.ell(), ActionMode::Dot);
        expr.add(weight, coeff);
    }
    let top = g.act(w, &block.rep, ctx.ell(), ActionMode::Dot);
    if expr.coeff(&top) != 1 {
        return Err(Error::Invariant("tilting character top coefficient is not 1".into()));
    }
    Ok(expr)
}

/// Expands a nabla-basis expression to exact weight multiplicities via the
/// Weyl characters of the dual group.
pub fn expand_to_weights(datum: &RootDatum, expr: &CharacterExpr) -> Result<Character> {
    if expr.basis() != Basis::Nabla {
        return Err(Error::Validation(
            "weight expansion is defined on nabla-basis expressions".into(),
        ));
    }
    let mut acc: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for (mu, coeff) in expr.iter() {
        let ch = datum.weyl_character(mu)?;
        for (wt, m) in ch.weight_mults() {
            *acc.entry(wt.clone()).or_insert(0) += coeff * (*m as i64);
        }
    }
    let mut out = BTreeMap::new();
    for (wt, c) in acc {
        if c < 0 {
            return Err(Error::Validation(
                "expression expands to a negative weight multiplicity".into(),
            ));
        }
        if c > 0 {
            out.insert(wt, c as u64);
        }
    }
    Ok(Character::from_mults(out))
}

/// The region `Y ⊂ ᶠW_aff` of the simple-character formulas, with witness
/// values `<w □_l ρ∨, α_0>` (stored doubled so half-integral `ρ∨` stays
/// exact).
#[derive(Clone, Debug)]
pub struct YRegion {
    pub ell: i64,
    pub coxeter_number: i64,
    /// Members with doubled witness values `2·<w □_l ρ∨, α_0>`.
    pub members: Vec<(AffineWeylElt, i64)>,
    /// Whether `l >= 2h-2`, the validity bound of the reciprocity formula.
    /// Membership itself is computed regardless.
    pub meets_paper_bound: bool,
}

impl YRegion {
    pub fn member_elements(&self) -> Vec<AffineWeylElt> {
        self.members.iter().map(|(w, _)| w.clone()).collect()
    }

    pub fn contains(&self, w: &AffineWeylElt) -> bool {
        self.members.iter().any(|(m, _)| m == w)
    }
}

/// Computes `Y = {w ∈ ᶠW : <w □_l ρ∨, α_0> < l(h-1)}` for a quasi-simple
/// datum. The scan cap `|R+|·h` is complete: members index alcoves inside a
/// bounded slab, which pins their length below the cap.
pub fn y_region(ctx: &LinkageContext) -> Result<YRegion> {
    let datum = ctx.datum();
    if datum.components().len() != 1 {
        return Err(Error::Validation("the Y region is defined for quasi-simple data".into()));
    }
    let h = datum.coxeter_number()?;
    let ell = ctx.ell();
    let alpha0 = datum.positive_roots()[datum.components()[0].highest_root].clone();
    let rho2 = datum.rho_check_doubled().to_vec();
    let g = ctx.group();

    let cap = (datum.positive_roots().len() as i64 * h) as u32;
    let scan = g.enumerate_fw(cap);
    let mut members = Vec::new();
    for w in &scan {
        let t2 = box_pair_doubled(w, &rho2, ell, &alpha0);
        if t2 < 2 * ell * (h - 1) {
            members.push((w.clone(), t2));
        }
    }
    // Ideal property in the Bruhat order restricted to ᶠW (asserted, not
    // assumed): anything below a member is a member.
    for (m, _) in &members {
        for z in &scan {
            if z.length() < m.length() && g.bruhat_leq(z, m) && !members.iter().any(|(y, _)| y == z)
            {
                return Err(Error::Invariant(
                    "Y region is not an ideal in the Bruhat order on ᶠW".into(),
                ));
            }
        }
    }
    Ok(YRegion { ell, coxeter_number: h, members, meets_paper_bound: ell >= 2 * h - 2 })
}

/// `2·<w □_l ρ∨, α>`, computed on doubled coweights.
fn box_pair_doubled(w: &AffineWeylElt, rho2: &[i64], ell: i64, alpha: &[i64]) -> i64 {
    let shifted: Vec<i64> = rho2
        .iter()
        .zip(w.translation_part())
        .map(|(&r, &t)| r + 2 * ell * t)
        .collect();
    let img = w.finite_part().apply(&shifted);
    img.iter().zip(alpha).map(|(&x, &a)| x * a).sum()
}

/// The hat map `y -> ŷ` on alcoves, supplied as input data.
#[derive(Clone, Debug, Default)]
pub struct HatMap {
    pairs: BTreeMap<AffineWeylElt, AffineWeylElt>,
}

impl HatMap {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (AffineWeylElt, AffineWeylElt)>) -> Self {
        HatMap { pairs: pairs.into_iter().collect() }
    }

    pub fn get(&self, y: &AffineWeylElt) -> Option<&AffineWeylElt> {
        self.pairs.get(y)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Defined on every member and injective there ("bijection data on Y";
    /// the image may leave a truncated member list, e.g. for the successor
    /// map on a chain).
    pub fn validate_on(&self, group: &WaffGroup, members: &[AffineWeylElt]) -> Result<()> {
        let mut images: Vec<&AffineWeylElt> = Vec::with_capacity(members.len());
        for y in members {
            let img = self.get(y).ok_or_else(|| {
                Error::Validation(format!(
                    "hat map is not defined on the member with word {:?}",
                    group.word(y)
                ))
            })?;
            if images.contains(&img) {
                return Err(Error::Validation("hat map is not injective on the members".into()));
            }
            if !group.is_min_in_wf(img) {
                return Err(Error::Validation("hat image must lie in ᶠW_aff".into()));
            }
            images.push(img);
        }
        Ok(())
    }

    /// Parses lines `y_word | yhat_word` (words as space-separated generator
    /// indices).
    pub fn load(group: &WaffGroup, content: &str) -> Result<HatMap> {
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 2 {
                return Err(Error::DataFile(format!(
                    "line {}: expected `y_word | yhat_word`",
                    lineno + 1
                )));
            }
            let y = parse_word(group, parts[0], lineno)?;
            let yhat = parse_word(group, parts[1], lineno)?;
            if pairs.insert(y, yhat).is_some() {
                return Err(Error::DataFile(format!("line {}: duplicate y entry", lineno + 1)));
            }
        }
        Ok(HatMap { pairs })
    }

    /// Canonical serialization; bit-exact round trip with `load` on
    /// canonical files.
    pub fn save(&self, group: &WaffGroup) -> String {
        let mut out = String::new();
        for (y, yhat) in &self.pairs {
            out.push_str(&format!("{} | {}\n", word_string(group, y), word_string(group, yhat)));
        }
        out
    }
}

fn parse_word(group: &WaffGroup, text: &str, lineno: usize) -> Result<AffineWeylElt> {
    let indices: Vec<usize> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| {
                Error::DataFile(format!("line {}: bad generator index '{t}'", lineno + 1))
            })
        })
        .collect::<Result<_>>()?;
    group
        .from_word(&indices)
        .map_err(|e| Error::DataFile(format!("line {}: {e}", lineno + 1)))
}

fn word_string(group: &WaffGroup, x: &AffineWeylElt) -> String {
    group.word(x).iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// `[∇(w •_l 0)] = Σ_{y ∈ members} ln_{w,ŷ}(1) · [L(y •_l 0)]`.
pub fn nabla_in_simples(
    ctx: &LinkageContext,
    w: &AffineWeylElt,
    table: &PCanTable,
    kl: &KlTable,
    hat: &HatMap,
    members: &[AffineWeylElt],
) -> Result<CharacterExpr> {
    let g = ctx.group();
    if !members.contains(w) {
        return Err(Error::Validation("w must be a member of the supplied Y region".into()));
    }
    hat.validate_on(g, members)?;
    let mut expr = CharacterExpr::new(Basis::Simple);
    for y in members {
        let yhat = hat.get(y).expect("validated above");
        let coeff = pcan_polynomial(table, kl, w, yhat)?.eval_at_one();
        let weight = g.act(y, &vec![0; ctx.datum().rank()], ctx.ell(), ActionMode::Dot);
        expr.add(weight, coeff);
    }
    Ok(expr)
}

/// `[L(w •_l 0)] = Σ_{y ∈ members} (-1)^{l(w)+l(y)} h_{y,w}(1) · [∇(y •_l 0)]`,
/// valid in the `kl_fallback` regime (`ln = n`).
pub fn simples_in_nablas_kl(
    ctx: &LinkageContext,
    w: &AffineWeylElt,
    kl: &KlTable,
    members: &[AffineWeylElt],
) -> Result<CharacterExpr> {
    let g = ctx.group();
    if !members.contains(w) {
        return Err(Error::Validation("w must be a member of the supplied Y region".into()));
    }
    let mut expr = CharacterExpr::new(Basis::Nabla);
    for y in members {
        if !g.bruhat_leq(y, w) {
            continue;
        }
        let h1 = kl.reg_kl_polynomial(y, w)?.eval_at_one();
        let sign = if (w.length() + y.length()).is_multiple_of(2) { 1 } else { -1 };
        let weight = g.act(y, &vec![0; ctx.datum().rank()], ctx.ell(), ActionMode::Dot);
        expr.add(weight, sign * h1);
    }
    Ok(expr)
}

/// Exact inverse of an integer matrix that is unitriangular with respect to
/// the supplied order (`m[order[i]][order[j]] = 0` for `j > i`, diagonal 1).
pub fn invert_unitriangular(m: &[Vec<i64>], order: &[usize]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    if order.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::Validation("matrix/order size mismatch".into()));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::Validation("order is not a permutation".into()));
        }
        seen[i] = true;
    }
    for (i, &oi) in order.iter().enumerate() {
        if m[oi][oi] != 1 {
            return Err(Error::Validation("matrix is not unitriangular: diagonal entry != 1".into()));
        }
        for &oj in &order[i + 1..] {
            if m[oi][oj] != 0 {
                return Err(Error::Validation(
                    "matrix is not unitriangular w.r.t. the supplied order".into(),
                ));
            }
        }
    }
    // In permuted coordinates A is lower unitriangular; X = A^{-1} via
    // forward substitution.
    let mut x = vec![vec![0i64; n]; n];
    for i in 0..n {
        x[i][i] = 1;
        for j in (0..i).rev() {
            let mut s = 0i64;
            for k in j..i {
                s += m[order[i]][order[k]] * x[k][j];
            }
            x[i][j] = -s;
        }
    }
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            out[order[i]][order[j]] = x[i][j];
        }
    }
    Ok(out)
}

/// Convenience: the block of `0` (always regular) for tilting computations.
pub fn principal_block(ctx: &LinkageContext) -> Result<Block> {
    block_of(ctx, &vec![0; ctx.datum().rank()])
}
