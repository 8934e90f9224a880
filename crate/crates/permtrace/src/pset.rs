//! The permuting-gamma set P_H = {γ : x + γ·f(x) is a bijection} for a
//! subfield-valued f, computed by two independent routes:
//!
//!  * brute force — test every γ with a bitmap occupancy check;
//!  * direction complement — P_H is the complement of the union of
//!    (I_c - I_b)/(b - c) over distinct fiber values b, c.
//!
//! Also the direction set D_f, the linearity detector f = Tr(ux), and the
//! cardinality audit: |P_H| ≤ q^n - q^(n-1) for nonconstant f, equality
//! forcing a linear witness, and the forbidden interval
//! [(q^n+1)/2, q^n - q^(n-1)) for odd prime q.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::gf::{FFElt, FieldCtx};
use crate::poly::{gamma_map, is_permutation, CodomainKind, FunctionTable, SparsePoly};

/// Quadratic pair cost: refuse direction-set enumeration above this size
/// unless forced.
const DIRECTION_CAP: u64 = 1 << 10;

/// Fibers I_b = {x : f(x) = b}, keyed by the subfield value b.
#[derive(Clone, Debug)]
pub struct PreimagePartition {
    classes: BTreeMap<FFElt, Vec<FFElt>>,
}

impl PreimagePartition {
    pub fn classes(&self) -> &BTreeMap<FFElt, Vec<FFElt>> {
        &self.classes
    }

    /// The value set S = f(F_{q^n}).
    pub fn value_set(&self) -> impl Iterator<Item = FFElt> + '_ {
        self.classes.keys().copied()
    }

    pub fn sizes(&self) -> BTreeMap<u64, usize> {
        self.classes.iter().map(|(b, c)| (b.0, c.len())).collect()
    }
}

pub fn preimage_partition(ctx: &FieldCtx, tt: &FunctionTable) -> PreimagePartition {
    debug_assert_eq!(tt.codomain(), CodomainKind::Subfield);
    let mut classes: BTreeMap<FFElt, Vec<FFElt>> = BTreeMap::new();
    for x in ctx.elems() {
        classes.entry(tt.get(x)).or_default().push(x);
    }
    PreimagePartition { classes }
}

/// Every γ for which x + γ·f(x) is a bijection, by direct testing.
pub fn ph_bruteforce(ctx: &FieldCtx, tt: &FunctionTable) -> Vec<FFElt> {
    ctx.elems()
        .filter(|&gamma| is_permutation(ctx, &gamma_map(ctx, tt, gamma)))
        .collect()
}

/// The same set as the complement of ∪_{b≠c} (I_c - I_b)/(b - c), with
/// early exit once the union saturates the nonzero elements.
pub fn ph_directions(ctx: &FieldCtx, part: &PreimagePartition) -> Vec<FFElt> {
    ph_directions_impl(ctx, part, true)
}

/// Full accumulation without the saturation short-circuit; kept for the
/// equivalence check between the two variants.
pub(crate) fn ph_directions_exhaustive(ctx: &FieldCtx, part: &PreimagePartition) -> Vec<FFElt> {
    ph_directions_impl(ctx, part, false)
}

fn ph_directions_impl(ctx: &FieldCtx, part: &PreimagePartition, early_exit: bool) -> Vec<FFElt> {
    let size = ctx.size() as usize;
    let mut excluded = Bitmap::new(size);
    let classes: Vec<(&FFElt, &Vec<FFElt>)> = part.classes.iter().collect();

    'pairs: for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            let (&b, fiber_b) = classes[i];
            let (&c, fiber_c) = classes[j];
            // difference set once, then one scale by (b - c)^-1
            let mut diffs = Bitmap::new(size);
            for &x in fiber_b {
                for &y in fiber_c {
                    diffs.set(ctx.sub(y, x).idx());
                }
            }
            let inv = ctx
                .inv(ctx.sub(b, c))
                .expect("distinct fiber values have nonzero difference");
            for d in diffs.set_indices() {
                excluded.set(ctx.mul(FFElt(d as u64), inv).idx());
            }
            if early_exit && excluded.count_ones() == size - 1 {
                break 'pairs;
            }
        }
    }
    excluded.unset_indices().into_iter().map(|i| FFElt(i as u64)).collect()
}

/// |D_f| over all unordered point pairs; quotients live in the big field and
/// equal-value pairs contribute the direction 0.
pub fn direction_set_size(ctx: &FieldCtx, tt: &FunctionTable, force: bool) -> Result<usize> {
    if ctx.size() > DIRECTION_CAP && !force {
        return Err(Error::CapExceeded {
            size: ctx.size(),
            cap: DIRECTION_CAP,
        });
    }
    let size = ctx.size() as usize;
    let mut seen = Bitmap::new(size);
    for x in 0..size as u64 {
        for y in x + 1..size as u64 {
            let (x, y) = (FFElt(x), FFElt(y));
            let num = ctx.sub(tt.get(y), tt.get(x));
            let den = ctx.inv(ctx.sub(y, x)).expect("x != y");
            seen.set(ctx.mul(num, den).idx());
        }
    }
    Ok(seen.count_ones())
}

/// The unique u with f(x) = Tr(ux) for all x, if one exists. Uniqueness
/// follows from the nondegeneracy of the trace form.
pub fn detect_linearity(ctx: &FieldCtx, tt: &FunctionTable) -> Option<FFElt> {
    ctx.elems()
        .find(|&u| ctx.elems().all(|x| tt.get(x) == ctx.rel_trace(ctx.mul(u, x))))
}

/// P_H, its complement, fiber sizes, direction count, and the cardinality
/// law verdicts for one subfield-valued table.
#[derive(Clone, Debug, Serialize)]
pub struct PhReport {
    pub ph: Vec<FFElt>,
    pub ph_complement: Vec<FFElt>,
    pub partition_sizes: BTreeMap<u64, usize>,
    pub direction_count: Option<usize>,
    pub is_constant: bool,
    pub linear_witness: Option<FFElt>,
    pub bound_ok: bool,
    pub gap_ok: bool,
}

impl PhReport {
    pub fn ph_size(&self) -> usize {
        self.ph.len()
    }
}

/// Assembles the full report. Fails with `TheoremViolation` if a nonconstant
/// table attains the bound q^n - q^(n-1) without a linear witness, which
/// would contradict the equality law.
pub fn cardinality_audit(ctx: &FieldCtx, tt: &FunctionTable) -> Result<PhReport> {
    let part = preimage_partition(ctx, tt);
    let ph = ph_directions(ctx, &part);
    let ph_complement = complement_of_sorted(ctx, &ph);
    let size = ctx.size();
    let bound = (size - size / ctx.q()) as usize;
    let is_constant = part.classes.len() == 1;

    let linear_witness = if !is_constant && ph.len() == bound {
        match detect_linearity(ctx, tt) {
            Some(u) => Some(u),
            None => {
                return Err(Error::TheoremViolation(format!(
                    "|P_H| = {bound} attained by a nonconstant table with no u such that f(x) = Tr(ux)"
                )))
            }
        }
    } else {
        None
    };

    let bound_ok = is_constant || ph.len() <= bound;
    let odd_prime_q = ctx.k() == 1 && ctx.p() != 2;
    let in_gap = ph.len() as u64 >= (size + 1) / 2 && ph.len() < bound;
    let gap_ok = !(odd_prime_q && in_gap);

    let direction_count = match direction_set_size(ctx, tt, false) {
        Ok(d) => Some(d),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };

    Ok(PhReport {
        ph,
        ph_complement,
        partition_sizes: part.sizes(),
        direction_count,
        is_constant,
        linear_witness,
        bound_ok,
        gap_ok,
    })
}

/// True iff the complement of P_H is closed under x ↦ x^(p^t). Requires
/// H to have coefficients in F_{p^t}.
pub fn frobenius_closure_check(
    ctx: &FieldCtx,
    h: &SparsePoly,
    t: u32,
    report: &PhReport,
) -> Result<bool> {
    if !h.coeffs_in_subfield(ctx, t)? {
        return Err(Error::HypothesisViolated(format!(
            "coefficients are not all in F_(p^{t})"
        )));
    }
    let e = ctx.p().pow(t);
    let mut in_comp = Bitmap::new(ctx.size() as usize);
    for &g in &report.ph_complement {
        in_comp.set(g.idx());
    }
    Ok(report
        .ph_complement
        .iter()
        .all(|&g| in_comp.get(ctx.pow(g, e).idx())))
}

fn complement_of_sorted(ctx: &FieldCtx, sorted: &[FFElt]) -> Vec<FFElt> {
    let mut out = Vec::with_capacity(ctx.size() as usize - sorted.len());
    let mut it = sorted.iter().peekable();
    for x in ctx.elems() {
        if it.peek() == Some(&&x) {
            it.next();
        } else {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::trace_table;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f9() -> FieldCtx {
        FieldCtx::build(3, 1, 2).unwrap()
    }

    fn random_table(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> FunctionTable {
        let sub = ctx.subfield_elems();
        let values = (0..ctx.size())
            .map(|_| sub[rng.random_range(0..sub.len())])
            .collect();
        FunctionTable::new_subfield(ctx, values).unwrap()
    }

    #[test]
    fn partition_shapes() {
        let ctx = f9();
        let const_tt = FunctionTable::new_subfield(&ctx, vec![FFElt(1); 9]).unwrap();
        let part = preimage_partition(&ctx, &const_tt);
        assert_eq!(part.sizes(), BTreeMap::from([(1, 9)]));

        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 1, FFElt::ONE));
        let part = preimage_partition(&ctx, &tt);
        assert_eq!(part.classes().len(), 3);
        assert!(part.classes().values().all(|c| c.len() == 3));

        // two-valued: 0 on the prime field, 1 elsewhere
        let values: Vec<FFElt> = ctx
            .elems()
            .map(|x| if x.0 < 3 { FFElt::ZERO } else { FFElt::ONE })
            .collect();
        let tt = FunctionTable::new_subfield(&ctx, values).unwrap();
        let part = preimage_partition(&ctx, &tt);
        assert_eq!(part.sizes(), BTreeMap::from([(0, 3), (1, 6)]));
    }

    #[test]
    fn bruteforce_on_constant_is_everything() {
        let ctx = f9();
        let tt = FunctionTable::new_subfield(&ctx, vec![FFElt(2); 9]).unwrap();
        assert_eq!(ph_bruteforce(&ctx, &tt).len(), 9);
    }

    #[test]
    fn bruteforce_square_f49_is_trivial() {
        let ctx = FieldCtx::build(7, 1, 2).unwrap();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 2, FFElt::ONE));
        assert_eq!(ph_bruteforce(&ctx, &tt), vec![FFElt::ZERO]);
    }

    #[test]
    fn bruteforce_x2_minus_norm_f25_is_subfield() {
        let ctx = FieldCtx::build(5, 1, 2).unwrap();
        let h = SparsePoly::new(&ctx, &[(2, FFElt::ONE), (6, ctx.neg(FFElt::ONE))]);
        let tt = trace_table(&ctx, &h);
        let expect: Vec<FFElt> = (0..5).map(FFElt).collect();
        assert_eq!(ph_bruteforce(&ctx, &tt), expect);
    }

    #[test]
    fn directions_on_single_class_is_everything() {
        let ctx = f9();
        let tt = FunctionTable::new_subfield(&ctx, vec![FFElt::ZERO; 9]).unwrap();
        let part = preimage_partition(&ctx, &tt);
        assert_eq!(ph_directions(&ctx, &part).len(), 9);
    }

    #[test]
    fn directions_match_bruteforce_on_random_tables() {
        for (p, k, n) in [(3u64, 1u32, 2u32), (2, 1, 3), (5, 1, 2)] {
            let ctx = FieldCtx::build(p, k, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..40 {
                let tt = random_table(&ctx, &mut rng);
                let part = preimage_partition(&ctx, &tt);
                let fast = ph_directions(&ctx, &part);
                let slow = ph_bruteforce(&ctx, &tt);
                assert_eq!(fast, slow);
                assert_eq!(fast, ph_directions_exhaustive(&ctx, &part));
                assert!(fast.contains(&FFElt::ZERO), "0 is always a member");
            }
        }
    }

    #[test]
    fn direction_count_of_constant_is_one() {
        let ctx = f9();
        let tt = FunctionTable::new_subfield(&ctx, vec![FFElt(1); 9]).unwrap();
        assert_eq!(direction_set_size(&ctx, &tt, false).unwrap(), 1);
    }

    #[test]
    fn direction_count_of_linear_trace() {
        // f = Tr(ux), u != 0: |D_f| = q^(n-1) + 1
        for (p, n, expect) in [(3u64, 2u32, 4usize), (5, 2, 6)] {
            let ctx = FieldCtx::build(p, 1, n).unwrap();
            for u in ctx.elems().filter(|u| !u.is_zero()) {
                let values = ctx.elems().map(|x| ctx.rel_trace(ctx.mul(u, x))).collect();
                let tt = FunctionTable::new_subfield(&ctx, values).unwrap();
                assert_eq!(direction_set_size(&ctx, &tt, false).unwrap(), expect);
            }
        }
    }

    #[test]
    fn direction_identity_on_random_f9() {
        let ctx = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let tt = random_table(&ctx, &mut rng);
            let part = preimage_partition(&ctx, &tt);
            let ph = ph_directions(&ctx, &part);
            let d = direction_set_size(&ctx, &tt, false).unwrap();
            assert_eq!(d + ph.len(), 10, "|D_f| + |P_H| = q^n + 1");
        }
    }

    #[test]
    fn direction_count_respects_cap() {
        let ctx = FieldCtx::build(2, 1, 11).unwrap();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 1, FFElt::ONE));
        assert!(matches!(
            direction_set_size(&ctx, &tt, false),
            Err(Error::CapExceeded { .. })
        ));
        assert!(direction_set_size(&ctx, &tt, true).is_ok());
    }

    #[test]
    fn linearity_detection() {
        let ctx = f9();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 1, FFElt::ONE));
        assert_eq!(detect_linearity(&ctx, &tt), Some(FFElt::ONE));

        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 2, FFElt::ONE));
        assert_eq!(detect_linearity(&ctx, &tt), None);
    }

    #[test]
    fn audit_of_constant_table() {
        let ctx = f9();
        let tt = FunctionTable::new_subfield(&ctx, vec![FFElt(2); 9]).unwrap();
        let report = cardinality_audit(&ctx, &tt).unwrap();
        assert!(report.is_constant);
        assert_eq!(report.ph_size(), 9);
        assert!(report.ph_complement.is_empty());
        assert!(report.bound_ok && report.gap_ok);
        assert_eq!(report.linear_witness, None);
        assert_eq!(report.direction_count, Some(1));
    }

    #[test]
    fn audit_of_linear_trace_f9() {
        let ctx = f9();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 1, FFElt::ONE));
        let report = cardinality_audit(&ctx, &tt).unwrap();
        assert_eq!(report.ph_size(), 6);
        assert_eq!(report.linear_witness, Some(FFElt::ONE));
        assert!(report.bound_ok && report.gap_ok);
        assert_eq!(report.direction_count, Some(4));

        // independent oracle: gamma fails exactly when some x != 0 solves
        // x + gamma*Tr(x) = 0
        for gamma in ctx.elems() {
            let fails = ctx.elems().filter(|x| !x.is_zero()).any(|x| {
                ctx.add(x, ctx.mul(gamma, ctx.rel_trace(x))).is_zero()
            });
            assert_eq!(report.ph.contains(&gamma), !fails);
        }
    }

    #[test]
    fn report_set_invariants() {
        let ctx = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let tt = random_table(&ctx, &mut rng);
            let report = cardinality_audit(&ctx, &tt).unwrap();
            assert_eq!(report.ph.len() + report.ph_complement.len(), 9);
            assert!(report.ph.contains(&FFElt::ZERO));
            assert!(!report.ph_complement.contains(&FFElt::ZERO));
            assert_eq!(
                report.partition_sizes.values().sum::<usize>(),
                9,
                "fibers partition the field"
            );
            // full set iff constant
            assert_eq!(report.ph.len() == 9, report.is_constant);
        }
    }

    #[test]
    fn frobenius_closure_examples() {
        let ctx = FieldCtx::build(7, 1, 2).unwrap();
        for k in [2u64, 8, 10] {
            let h = SparsePoly::monomial(&ctx, k, FFElt::ONE);
            let tt = trace_table(&ctx, &h);
            let report = cardinality_audit(&ctx, &tt).unwrap();
            assert!(frobenius_closure_check(&ctx, &h, 1, &report).unwrap());
        }

        let ctx = f9();
        let h = SparsePoly::constant(&ctx, FFElt::ONE);
        let tt = trace_table(&ctx, &h);
        let report = cardinality_audit(&ctx, &tt).unwrap();
        assert!(report.ph_complement.is_empty());
        assert!(frobenius_closure_check(&ctx, &h, 1, &report).unwrap());
    }

    #[test]
    fn frobenius_closure_rejects_wrong_coefficient_field() {
        let ctx = FieldCtx::build(3, 2, 2).unwrap();
        let u = ctx
            .subfield_elems()
            .iter()
            .copied()
            .find(|&s| ctx.pow(s, 3) != s)
            .unwrap();
        let h = SparsePoly::new(&ctx, &[(2, u)]);
        let tt = trace_table(&ctx, &h);
        let report = cardinality_audit(&ctx, &tt).unwrap();
        assert!(matches!(
            frobenius_closure_check(&ctx, &h, 1, &report),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
