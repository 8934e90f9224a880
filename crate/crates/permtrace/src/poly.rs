//! Sparse polynomials over the big field, total value tables, the map
//! x + γ·Tr(H(x)), bijection testing, and Lagrange interpolation back from
//! tables to reduced polynomials.
//!
//! The permuting-gamma pipeline operates on value tables; polynomials are an
//! input/output convenience.

use serde::{Deserialize, Serialize};

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::gf::{FFElt, FieldCtx};

/// Interpolation is O(q^2n); refuse above this field size.
const INTERP_CAP: u64 = 1 << 12;

/// Polynomial with strictly increasing exponents and no zero coefficients.
/// Nonzero exponents are reduced into [1, q^n - 1] at construction, since
/// x^(q^n) = x on points; the zero polynomial has an empty term list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePoly {
    terms: Vec<(u64, FFElt)>,
}

impl SparsePoly {
    pub fn new(ctx: &FieldCtx, terms: &[(u64, FFElt)]) -> SparsePoly {
        let ord = ctx.size() - 1;
        let mut reduced: Vec<(u64, FFElt)> = Vec::with_capacity(terms.len());
        for &(e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let e = if e == 0 { 0 } else { (e - 1) % ord + 1 };
            reduced.push((e, c));
        }
        reduced.sort_by_key(|&(e, _)| e);
        let mut merged: Vec<(u64, FFElt)> = Vec::with_capacity(reduced.len());
        for (e, c) in reduced {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc = ctx.add(*lc, c),
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|&(_, c)| !c.is_zero());
        SparsePoly { terms: merged }
    }

    /// The monomial c·x^e.
    pub fn monomial(ctx: &FieldCtx, e: u64, c: FFElt) -> SparsePoly {
        SparsePoly::new(ctx, &[(e, c)])
    }

    pub fn constant(ctx: &FieldCtx, c: FFElt) -> SparsePoly {
        SparsePoly::new(ctx, &[(0, c)])
    }

    pub fn terms(&self) -> &[(u64, FFElt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// None for the zero polynomial; no -inf sentinel.
    pub fn degree(&self) -> Option<u64> {
        self.terms.last().map(|&(e, _)| e)
    }

    /// True iff every coefficient lies in F_{p^t}. t must divide m.
    pub fn coeffs_in_subfield(&self, ctx: &FieldCtx, t: u32) -> Result<bool> {
        if t == 0 || ctx.m() % t != 0 {
            return Err(Error::BadSubfieldDegree { t, m: ctx.m() });
        }
        let e = ctx.p().pow(t);
        Ok(self.terms.iter().all(|&(_, c)| ctx.pow(c, e) == c))
    }
}

pub fn eval_poly(ctx: &FieldCtx, poly: &SparsePoly, x: FFElt) -> FFElt {
    let mut acc = FFElt::ZERO;
    for &(e, c) in poly.terms() {
        acc = ctx.add(acc, ctx.mul(c, ctx.pow(x, e)));
    }
    acc
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodomainKind {
    BigField,
    Subfield,
}

/// Total map on F_{q^n}: position i holds the image of the element with
/// index i. Subfield tables are the maps f = Tr(H(x)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    codomain: CodomainKind,
    values: Vec<FFElt>,
}

impl FunctionTable {
    pub fn new_subfield(ctx: &FieldCtx, values: Vec<FFElt>) -> Result<FunctionTable> {
        if values.len() as u64 != ctx.size() {
            return Err(Error::BadParameters(format!(
                "table has {} entries, field has {}",
                values.len(),
                ctx.size()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| !ctx.in_subfield(v)) {
            return Err(Error::BadParameters(format!(
                "table value {v} is not in the F_q subfield"
            )));
        }
        Ok(FunctionTable {
            codomain: CodomainKind::Subfield,
            values,
        })
    }

    pub fn new_big_field(ctx: &FieldCtx, values: Vec<FFElt>) -> Result<FunctionTable> {
        if values.len() as u64 != ctx.size() {
            return Err(Error::BadParameters(format!(
                "table has {} entries, field has {}",
                values.len(),
                ctx.size()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v.0 >= ctx.size()) {
            return Err(Error::BadParameters(format!("index {v} out of range")));
        }
        Ok(FunctionTable {
            codomain: CodomainKind::BigField,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(codomain: CodomainKind, values: Vec<FFElt>) -> Self {
        FunctionTable { codomain, values }
    }

    pub fn codomain(&self) -> CodomainKind {
        self.codomain
    }

    pub fn values(&self) -> &[FFElt] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: FFElt) -> FFElt {
        self.values[x.idx()]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Tabulates x ↦ Tr(H(x)); the result is subfield-valued.
pub fn trace_table(ctx: &FieldCtx, h: &SparsePoly) -> FunctionTable {
    let values = ctx
        .elems()
        .map(|x| ctx.rel_trace(eval_poly(ctx, h, x)))
        .collect();
    FunctionTable::from_parts_unchecked(CodomainKind::Subfield, values)
}

/// Tabulates an arbitrary polynomial as a big-field table.
pub fn tabulate(ctx: &FieldCtx, poly: &SparsePoly) -> FunctionTable {
    let values = ctx.elems().map(|x| eval_poly(ctx, poly, x)).collect();
    FunctionTable::from_parts_unchecked(CodomainKind::BigField, values)
}

/// The map x ↦ x + γ·f(x) for a subfield-valued f.
pub fn gamma_map(ctx: &FieldCtx, tt: &FunctionTable, gamma: FFElt) -> FunctionTable {
    assert_eq!(
        tt.codomain(),
        CodomainKind::Subfield,
        "gamma_map needs a subfield-valued table"
    );
    let values = ctx
        .elems()
        .map(|x| ctx.add(x, ctx.mul(gamma, tt.get(x))))
        .collect();
    FunctionTable::from_parts_unchecked(CodomainKind::BigField, values)
}

/// Bitmap occupancy test: true iff all values are distinct.
pub fn is_permutation(ctx: &FieldCtx, ft: &FunctionTable) -> bool {
    let mut seen = Bitmap::new(ctx.size() as usize);
    ft.values().iter().all(|v| seen.set(v.idx()))
}

/// The unique reduced polynomial of degree < q^n matching the table:
/// f(x) = Σ_a ft[a]·(1 - (x-a)^(q^n - 1)).
pub fn interpolate(ctx: &FieldCtx, ft: &FunctionTable) -> Result<SparsePoly> {
    let size = ctx.size();
    if size > INTERP_CAP {
        return Err(Error::CapExceeded {
            size,
            cap: INTERP_CAP,
        });
    }
    let n = size as usize;
    let binom = binom_row_ppow_minus_one(ctx);

    let mut coeffs = vec![FFElt::ZERO; n];
    for a in ctx.elems() {
        let v = ft.get(a);
        if v.is_zero() {
            continue;
        }
        coeffs[0] = ctx.add(coeffs[0], v);
        let neg_a = ctx.neg(a);
        let mut pw = FFElt::ONE; // (-a)^t, t = q^n - 1 - j
        for t in 0..n {
            let j = n - 1 - t;
            let contrib = ctx.mul(v, ctx.mul(binom[j], pw));
            coeffs[j] = ctx.sub(coeffs[j], contrib);
            pw = ctx.mul(pw, neg_a);
        }
    }

    let terms: Vec<(u64, FFElt)> = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j as u64, c))
        .collect();
    Ok(SparsePoly { terms })
}

/// Binomial row C(q^n - 1, j) mod p as field constants. The base-p digits of
/// q^n - 1 are all p-1, so by Lucas the value is a product of C(p-1, d) over
/// the digits d of j.
fn binom_row_ppow_minus_one(ctx: &FieldCtx) -> Vec<FFElt> {
    let p = ctx.p();
    // row p-1 of Pascal's triangle mod p, via the multiplicative recurrence;
    // d < p is invertible mod p
    let mut row = vec![1u64; p as usize];
    for d in 1..p as usize {
        let num = (p - d as u64) % p;
        let inv_d = pow_mod(d as u64, p - 2, p);
        row[d] = row[d - 1] * num % p * inv_d % p;
    }
    (0..ctx.size())
        .map(|j| {
            let mut t = j;
            let mut acc = 1u64;
            while t > 0 {
                acc = acc * row[(t % p) as usize] % p;
                t /= p;
            }
            ctx.scalar(acc)
        })
        .collect()
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f9() -> FieldCtx {
        FieldCtx::build(3, 1, 2).unwrap()
    }

    /// Term-by-term reference evaluator with its own power loop.
    fn eval_naive(ctx: &FieldCtx, terms: &[(u64, FFElt)], x: FFElt) -> FFElt {
        let mut acc = FFElt::ZERO;
        for &(e, c) in terms {
            let mut pw = FFElt::ONE;
            for _ in 0..e {
                pw = ctx.mul(pw, x);
            }
            acc = ctx.add(acc, ctx.mul(c, pw));
        }
        acc
    }

    #[test]
    fn construction_reduces_and_merges() {
        let ctx = f9();
        // x^9 = x on points; 8 -> stays; duplicate exponents merge
        let p = SparsePoly::new(&ctx, &[(9, FFElt::ONE), (1, FFElt::ONE), (8, FFElt(2))]);
        assert_eq!(p.terms(), &[(1, FFElt(2)), (8, FFElt(2))]);
        let z = SparsePoly::new(&ctx, &[(3, FFElt::ONE), (3, FFElt(2))]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn eval_identity_and_alpha_square() {
        let ctx = f9();
        let ident = SparsePoly::monomial(&ctx, 1, FFElt::ONE);
        for x in ctx.elems() {
            assert_eq!(eval_poly(&ctx, &ident, x), x);
        }
        let u = ctx.find_nonresidue().unwrap();
        let alpha = ctx.elems().find(|&a| ctx.mul(a, a) == u).unwrap();
        let sq = SparsePoly::monomial(&ctx, 2, FFElt::ONE);
        assert_eq!(eval_poly(&ctx, &sq, alpha), u);
    }

    #[test]
    fn eval_matches_reference_on_f25() {
        let ctx = FieldCtx::build(5, 1, 2).unwrap();
        let raw = [(7u64, FFElt(3)), (24, FFElt(11)), (0, FFElt(20)), (13, FFElt(1))];
        let p = SparsePoly::new(&ctx, &raw);
        for x in ctx.elems() {
            assert_eq!(eval_poly(&ctx, &p, x), eval_naive(&ctx, &raw, x));
        }
    }

    #[test]
    fn trace_table_of_constant_and_identity() {
        let ctx = f9();
        let c = FFElt(5);
        let tt = trace_table(&ctx, &SparsePoly::constant(&ctx, c));
        assert!(tt.values().iter().all(|&v| v == ctx.rel_trace(c)));

        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 1, FFElt::ONE));
        let mut counts = std::collections::BTreeMap::new();
        for &v in tt.values() {
            *counts.entry(v).or_insert(0usize) += 1;
        }
        assert!(counts.values().all(|&c| c == 3), "balanced trace table");
    }

    #[test]
    fn trace_table_of_square_in_coordinates() {
        // Tr((x1 + x2 a)^2) = 2 x1^2 + 2 u x2^2 where a^2 = u
        for (p, k) in [(3u64, 1u32), (5, 1)] {
            let ctx = FieldCtx::build(p, k, 2).unwrap();
            let u = ctx.find_nonresidue().unwrap();
            let alpha = ctx.elems().find(|&a| ctx.mul(a, a) == u).unwrap();
            let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 2, FFElt::ONE));
            let two = ctx.scalar(2 % p);
            for &x1 in ctx.subfield_elems() {
                for &x2 in ctx.subfield_elems() {
                    let x = ctx.add(x1, ctx.mul(x2, alpha));
                    let expect = ctx.add(
                        ctx.mul(two, ctx.mul(x1, x1)),
                        ctx.mul(two, ctx.mul(u, ctx.mul(x2, x2))),
                    );
                    assert_eq!(tt.get(x), expect);
                }
            }
        }
    }

    #[test]
    fn gamma_map_basics() {
        let ctx = f9();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 2, FFElt::ONE));
        let id = gamma_map(&ctx, &tt, FFElt::ZERO);
        for x in ctx.elems() {
            assert_eq!(id.get(x), x);
        }
        // constant f: x + gamma*s is a translation, always a bijection
        let const_tt =
            FunctionTable::new_subfield(&ctx, vec![FFElt(2); 9]).unwrap();
        for gamma in ctx.elems() {
            assert!(is_permutation(&ctx, &gamma_map(&ctx, &const_tt, gamma)));
        }
    }

    #[test]
    fn gamma_map_with_trace_minus_one_collides() {
        // f = Tr(x): x + gamma*Tr(x) has nonzero kernel exactly when Tr(gamma) = -1
        let ctx = f9();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 1, FFElt::ONE));
        let minus_one = ctx.neg(FFElt::ONE);
        for gamma in ctx.elems() {
            let ft = gamma_map(&ctx, &tt, gamma);
            let collides = ctx
                .elems()
                .filter(|x| !x.is_zero())
                .any(|x| ft.get(x) == ft.get(FFElt::ZERO));
            assert_eq!(collides, ctx.rel_trace(gamma) == minus_one, "gamma={gamma}");
            assert_eq!(is_permutation(&ctx, &ft), ctx.rel_trace(gamma) != minus_one);
        }
    }

    #[test]
    fn square_family_never_permutes_for_nonzero_gamma() {
        let ctx = f9();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 2, FFElt::ONE));
        for gamma in ctx.elems().filter(|g| !g.is_zero()) {
            assert!(!is_permutation(&ctx, &gamma_map(&ctx, &tt, gamma)));
        }
    }

    #[test]
    fn same_fiber_inputs_never_collide() {
        let ctx = f9();
        let tt = trace_table(&ctx, &SparsePoly::monomial(&ctx, 2, FFElt::ONE));
        for gamma in ctx.elems() {
            let ft = gamma_map(&ctx, &tt, gamma);
            for x in ctx.elems() {
                for y in ctx.elems().filter(|&y| y != x) {
                    if tt.get(x) == tt.get(y) {
                        assert_ne!(ft.get(x), ft.get(y));
                    }
                }
            }
        }
    }

    #[test]
    fn interpolate_identity_and_constant() {
        let ctx = f9();
        let id_table =
            FunctionTable::new_big_field(&ctx, ctx.elems().collect()).unwrap();
        let p = interpolate(&ctx, &id_table).unwrap();
        assert_eq!(p, SparsePoly::monomial(&ctx, 1, FFElt::ONE));

        let c = FFElt(7);
        let const_table = FunctionTable::new_big_field(&ctx, vec![c; 9]).unwrap();
        let p = interpolate(&ctx, &const_table).unwrap();
        assert_eq!(p, SparsePoly::constant(&ctx, c));
    }

    #[test]
    fn interpolate_rejects_large_fields() {
        let ctx = FieldCtx::build(2, 1, 13).unwrap();
        let t = FunctionTable::new_big_field(&ctx, vec![FFElt::ZERO; 8192]).unwrap();
        assert!(matches!(
            interpolate(&ctx, &t),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn coeffs_in_subfield_examples() {
        let ctx = FieldCtx::build(3, 2, 2).unwrap(); // F_81 over F_9
        let p01 = SparsePoly::new(&ctx, &[(2, FFElt::ONE), (5, FFElt::ONE)]);
        assert!(p01.coeffs_in_subfield(&ctx, 1).unwrap());
        assert!(p01.coeffs_in_subfield(&ctx, 2).unwrap());
        assert!(p01.coeffs_in_subfield(&ctx, 4).unwrap());

        // u in the canonical F_9 but outside F_3
        let u = ctx
            .subfield_elems()
            .iter()
            .copied()
            .find(|&s| ctx.pow(s, 3) != s)
            .unwrap();
        let p = SparsePoly::new(&ctx, &[(2, u)]);
        assert!(p.coeffs_in_subfield(&ctx, 2).unwrap());
        assert!(!p.coeffs_in_subfield(&ctx, 1).unwrap());
        assert!(matches!(
            p.coeffs_in_subfield(&ctx, 3),
            Err(Error::BadSubfieldDegree { .. })
        ));
    }

    proptest! {
        #[test]
        fn interpolate_round_trips_f25(seed in proptest::collection::vec(0u64..25, 4)) {
            let ctx = FieldCtx::build(5, 1, 2).unwrap();
            let raw: Vec<(u64, FFElt)> = seed
                .iter()
                .enumerate()
                .map(|(i, &c)| ((7 * i as u64 + c) % 24 + 1, FFElt(c)))
                .collect();
            let p = SparsePoly::new(&ctx, &raw);
            let table = tabulate(&ctx, &p);
            let q = interpolate(&ctx, &table).unwrap();
            prop_assert_eq!(&q, &p, "interpolate . tabulate = reduce");
            prop_assert_eq!(tabulate(&ctx, &q), table, "tabulate . interpolate = id");
        }

        #[test]
        fn gamma_zero_is_always_identity(vals in proptest::collection::vec(0u64..3, 9)) {
            let ctx = FieldCtx::build(3, 1, 2).unwrap();
            let tt = FunctionTable::new_subfield(&ctx, vals.into_iter().map(FFElt).collect()).unwrap();
            let ft = gamma_map(&ctx, &tt, FFElt::ZERO);
            prop_assert!(is_permutation(&ctx, &ft));
            for x in ctx.elems() {
                prop_assert_eq!(ft.get(x), x);
            }
        }
    }
}
