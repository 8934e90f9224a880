//! Linear translators of a subfield-valued f: α ≠ 0 is a b-translator when
//! f(x + uα) - f(x) = ub for all x in the big field and u in F_q. The set
//! Λ of all translators (with 0 adjoined) is an F_q-space; when some
//! translator carries a nonzero constant, the 0-translators form a hyperplane
//! Λ₀ spanned by β_i = α₁b_i - α_i b₁.
//!
//! Translators are found by exhaustive α sweep, which keeps this module
//! independent of any representation choice and usable as the oracle for the
//! structural checks.

use serde::Serialize;

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::gf::{FFElt, FieldCtx};
use crate::poly::{CodomainKind, FunctionTable};
use crate::pset::PhReport;

/// Basis of Λ with the derived 0-translator basis. When any basis vector
/// carries a nonzero constant, the leading one does.
#[derive(Clone, Debug, Serialize)]
pub struct TranslatorSpace {
    pub basis: Vec<(FFElt, FFElt)>,
    pub lambda0_basis: Vec<FFElt>,
}

impl TranslatorSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn has_nonzero_constant(&self) -> bool {
        self.basis.first().is_some_and(|&(_, b)| !b.is_zero())
    }
}

/// The constant a with f(x + uα) - f(x) = ua for all (x, u), or None.
/// a is forced by (x, u) = (0, 1) and then verified globally.
pub fn translator_constant(
    ctx: &FieldCtx,
    tt: &FunctionTable,
    alpha: FFElt,
) -> Result<Option<FFElt>> {
    debug_assert_eq!(tt.codomain(), CodomainKind::Subfield);
    if alpha.is_zero() {
        return Err(Error::ZeroAlpha);
    }
    let a = ctx.sub(tt.get(alpha), tt.get(FFElt::ZERO));
    for &u in ctx.subfield_elems() {
        let step = ctx.mul(u, alpha);
        let expect = ctx.mul(u, a);
        for x in ctx.elems() {
            if ctx.sub(tt.get(ctx.add(x, step)), tt.get(x)) != expect {
                return Ok(None);
            }
        }
    }
    Ok(Some(a))
}

/// Sweeps every nonzero α, extracts a greedy F_q-basis of Λ in increasing
/// index order, then derives the 0-translator basis.
pub fn translator_space(ctx: &FieldCtx, tt: &FunctionTable) -> TranslatorSpace {
    let size = ctx.size() as usize;
    let mut span = Bitmap::new(size);
    span.set(0);
    let mut span_list = vec![FFElt::ZERO];
    let mut basis: Vec<(FFElt, FFElt)> = Vec::new();

    for alpha in ctx.elems().filter(|a| !a.is_zero()) {
        if span.get(alpha.idx()) {
            continue;
        }
        if let Some(b) = translator_constant(ctx, tt, alpha).expect("alpha is nonzero") {
            basis.push((alpha, b));
            grow_span(ctx, &mut span, &mut span_list, alpha);
        }
    }

    if let Some(j) = basis.iter().position(|&(_, b)| !b.is_zero()) {
        basis.swap(0, j);
    }
    let lambda0_basis = if basis.first().is_none_or(|&(_, b)| b.is_zero()) {
        // every constant is zero, so Λ₀ = Λ
        basis.iter().map(|&(a, _)| a).collect()
    } else {
        let (a1, b1) = basis[0];
        basis[1..]
            .iter()
            .map(|&(ai, bi)| ctx.sub(ctx.mul(a1, bi), ctx.mul(ai, b1)))
            .collect()
    };
    TranslatorSpace {
        basis,
        lambda0_basis,
    }
}

/// Skipping an α already inside the current span is sound because greedy
/// membership only ever skips F_q-combinations of found translators, and Λ
/// is closed under those.
fn grow_span(ctx: &FieldCtx, span: &mut Bitmap, span_list: &mut Vec<FFElt>, gen: FFElt) {
    let old_len = span_list.len();
    for &u in ctx.subfield_elems() {
        if u.is_zero() {
            continue;
        }
        let step = ctx.mul(u, gen);
        for i in 0..old_len {
            let e = ctx.add(span_list[i], step);
            if span.set(e.idx()) {
                span_list.push(e);
            }
        }
    }
}

/// All F_q-combinations of the given vectors, as an element list.
pub fn fq_span(ctx: &FieldCtx, gens: &[FFElt]) -> Vec<FFElt> {
    let mut span = Bitmap::new(ctx.size() as usize);
    span.set(0);
    let mut list = vec![FFElt::ZERO];
    for &g in gens {
        grow_span(ctx, &mut span, &mut list, g);
    }
    list.sort();
    list
}

/// True iff the vectors are F_q-linearly independent.
pub fn fq_independent(ctx: &FieldCtx, vecs: &[FFElt]) -> bool {
    let mut span = Bitmap::new(ctx.size() as usize);
    span.set(0);
    let mut list = vec![FFElt::ZERO];
    for &v in vecs {
        if v.is_zero() || span.get(v.idx()) {
            return false;
        }
        grow_span(ctx, &mut span, &mut list, v);
    }
    true
}

/// Coset law for 0-translators: αF_q ⊆ P_H exactly when α is a 0-translator.
pub fn check_zero_translator_coset_law(
    ctx: &FieldCtx,
    tt: &FunctionTable,
    report: &PhReport,
) -> bool {
    let ph_bits = membership(ctx, &report.ph);
    for alpha in ctx.elems().filter(|a| !a.is_zero()) {
        let coset_in_ph = ctx
            .subfield_elems()
            .iter()
            .all(|&u| ph_bits.get(ctx.mul(u, alpha).idx()));
        let is_zero_translator =
            translator_constant(ctx, tt, alpha).expect("alpha is nonzero") == Some(FFElt::ZERO);
        if coset_in_ph != is_zero_translator {
            return false;
        }
    }
    true
}

/// Coset law for b-translators with b ≠ 0: when the coset αF_q meets every
/// fiber exactly once, all of it except -α/b lies in P_H; otherwise the
/// coset meets P_H only at 0.
pub fn check_nonzero_translator_coset_law(
    ctx: &FieldCtx,
    tt: &FunctionTable,
    report: &PhReport,
) -> bool {
    let ph_bits = membership(ctx, &report.ph);
    for alpha in ctx.elems().filter(|a| !a.is_zero()) {
        match translator_constant(ctx, tt, alpha).expect("alpha is nonzero") {
            Some(b) if !b.is_zero() => {
                if !nonzero_translator_case(ctx, tt, &ph_bits, alpha, b) {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

pub(crate) fn nonzero_translator_case(
    ctx: &FieldCtx,
    tt: &FunctionTable,
    ph_bits: &Bitmap,
    alpha: FFElt,
    b: FFElt,
) -> bool {
    let mut classes: Vec<FFElt> = ctx
        .subfield_elems()
        .iter()
        .map(|&u| tt.get(ctx.mul(u, alpha)))
        .collect();
    classes.sort();
    classes.dedup();
    let uniform = classes.len() == ctx.subfield_elems().len();

    if uniform {
        let bad = ctx.mul(ctx.neg(alpha), ctx.inv(b).expect("b is nonzero"));
        ctx.subfield_elems().iter().all(|&u| {
            let gamma = ctx.mul(u, alpha);
            ph_bits.get(gamma.idx()) == (gamma != bad)
        })
    } else {
        ctx.subfield_elems().iter().all(|&u| {
            let gamma = ctx.mul(u, alpha);
            ph_bits.get(gamma.idx()) == gamma.is_zero()
        })
    }
}

/// Structure of Λ when a nonzero constant exists: each β_i is a 0-translator,
/// the β_i are independent and span a hyperplane of dimension dim(Λ) - 1, and
/// for the leading b-translator α the whole coset α + Λ₀ consists of
/// b-translators with {α, α+β_2, ..., α+β_m} a basis of Λ. Vacuously true
/// when every constant is zero.
pub fn check_translator_space_structure(
    ctx: &FieldCtx,
    space: &TranslatorSpace,
    tt: &FunctionTable,
) -> bool {
    if !space.has_nonzero_constant() {
        return true;
    }
    let (alpha, b) = space.basis[0];

    for &beta in &space.lambda0_basis {
        if beta.is_zero() {
            return false;
        }
        if translator_constant(ctx, tt, beta).expect("beta is nonzero") != Some(FFElt::ZERO) {
            return false;
        }
    }
    if !fq_independent(ctx, &space.lambda0_basis) {
        return false;
    }
    if space.lambda0_basis.len() != space.dim() - 1 {
        return false;
    }

    for lam in fq_span(ctx, &space.lambda0_basis) {
        let shifted = ctx.add(alpha, lam);
        if shifted.is_zero() {
            return false;
        }
        if translator_constant(ctx, tt, shifted).expect("shifted is nonzero") != Some(b) {
            return false;
        }
    }
    let mut shifted_basis = vec![alpha];
    shifted_basis.extend(space.lambda0_basis.iter().map(|&beta| ctx.add(alpha, beta)));
    fq_independent(ctx, &shifted_basis)
}

fn membership(ctx: &FieldCtx, elems: &[FFElt]) -> Bitmap {
    let mut bits = Bitmap::new(ctx.size() as usize);
    for &e in elems {
        bits.set(e.idx());
    }
    bits
}
