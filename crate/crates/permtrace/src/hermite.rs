//! Bivariate machinery over F_q for maps on F_{q^2}: decompose a big-field
//! table into coordinate polynomials through the basis {1, α} with α² = u a
//! non-residue, reduce modulo (x1^q - x1, x2^q - x2), extract the coefficient
//! of x1^(q-1) x2^(q-1), and decide orthogonality of the pair.
//!
//! A pair (f1, f2) is orthogonal exactly when the recomposed map is a
//! bijection of F_q², which is what the coefficient conditions test.

use crate::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::gf::{FFElt, FieldCtx};
use crate::poly::FunctionTable;

/// Coordinates of F_{q^2} over F_q in the basis {1, α}, α² = u.
pub struct QuadExt {
    pub alpha: FFElt,
    pub u: FFElt,
    /// element index -> positions (i, j) into subfield_elems with
    /// x = s_i + s_j·α
    coords: Vec<(usize, usize)>,
}

impl QuadExt {
    pub fn new(ctx: &FieldCtx) -> Result<QuadExt> {
        if ctx.n() != 2 {
            return Err(Error::NotQuadraticExtension(ctx.n()));
        }
        let u = ctx.find_nonresidue()?;
        let alpha = ctx
            .elems()
            .find(|&a| ctx.mul(a, a) == u)
            .expect("a quadratic extension contains roots of x^2 = u");
        let size = ctx.size() as usize;
        let mut coords = vec![None; size];
        for (i, &x1) in ctx.subfield_elems().iter().enumerate() {
            for (j, &x2) in ctx.subfield_elems().iter().enumerate() {
                let e = ctx.add(x1, ctx.mul(x2, alpha));
                assert!(coords[e.idx()].is_none(), "{{1, α}} must be a basis");
                coords[e.idx()] = Some((i, j));
            }
        }
        let coords = coords.into_iter().map(|c| c.expect("basis spans")).collect();
        Ok(QuadExt { alpha, u, coords })
    }

    /// Subfield positions (i, j) of x = s_i + s_j·α.
    #[inline]
    pub fn coords(&self, x: FFElt) -> (usize, usize) {
        self.coords[x.idx()]
    }

    #[inline]
    pub fn compose(&self, ctx: &FieldCtx, x1: FFElt, x2: FFElt) -> FFElt {
        ctx.add(x1, ctx.mul(x2, self.alpha))
    }
}

/// Dense q×q coefficient grid: entry (i, j) is the coefficient of
/// x1^i x2^j, a subfield element. Reduced form is canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    q: usize,
    coeffs: Vec<FFElt>,
}

impl BiPoly {
    pub fn zero(q: usize) -> BiPoly {
        BiPoly {
            q,
            coeffs: vec![FFElt::ZERO; q * q],
        }
    }

    /// Row-major grid input; validates length and subfield membership.
    pub fn from_grid(ctx: &FieldCtx, coeffs: Vec<FFElt>) -> Result<BiPoly> {
        let q = ctx.q() as usize;
        if coeffs.len() != q * q {
            return Err(Error::BadParameters(format!(
                "grid has {} entries, expected {}",
                coeffs.len(),
                q * q
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| !ctx.in_subfield(c)) {
            return Err(Error::BadParameters(format!(
                "coefficient {c} is not in the F_q subfield"
            )));
        }
        Ok(BiPoly { q, coeffs })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FFElt {
        self.coeffs[i * self.q + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, c: FFElt) {
        self.coeffs[i * self.q + j] = c;
    }

    pub fn coeffs(&self) -> &[FFElt] {
        &self.coeffs
    }

    pub fn eval(&self, ctx: &FieldCtx, x1: FFElt, x2: FFElt) -> FFElt {
        // Horner in x1, rows evaluated by Horner in x2
        let mut acc = FFElt::ZERO;
        for i in (0..self.q).rev() {
            let mut row = FFElt::ZERO;
            for j in (0..self.q).rev() {
                row = ctx.add(ctx.mul(row, x2), self.get(i, j));
            }
            acc = ctx.add(ctx.mul(acc, x1), row);
        }
        acc
    }
}

/// Row q-1 of Pascal's triangle as field constants, built by repeated sums
/// of 1 so the values are field-native from the start.
fn binomial_row(ctx: &FieldCtx, n: usize) -> Vec<FFElt> {
    let mut row = vec![FFElt::ONE];
    for _ in 0..n {
        let mut next = vec![FFElt::ONE; row.len() + 1];
        for i in 1..row.len() {
            next[i] = ctx.add(row[i - 1], row[i]);
        }
        row = next;
    }
    row
}

/// Coefficients of the point indicator 1 - (y - a)^(q-1), degree < q.
fn lagrange_coeffs(ctx: &FieldCtx, a: FFElt) -> Vec<FFElt> {
    let q = ctx.q() as usize;
    let binom = binomial_row(ctx, q - 1);
    let neg_a = ctx.neg(a);
    let mut out = vec![FFElt::ZERO; q];
    // (y - a)^(q-1) = sum_r C(q-1, r) (-a)^(q-1-r) y^r
    let mut pw = FFElt::ONE; // (-a)^t with t = q-1-r
    for t in 0..q {
        let r = q - 1 - t;
        out[r] = ctx.neg(ctx.mul(binom[r], pw));
        pw = ctx.mul(pw, neg_a);
    }
    out[0] = ctx.add(out[0], FFElt::ONE);
    out
}

/// Coordinate polynomials (f1, f2) of a big-field table on F_{q^2}:
/// ft[x1 + x2·α] = f1(x1,x2) + f2(x1,x2)·α at every point, by bivariate
/// interpolation against the point indicators.
pub fn decompose(ctx: &FieldCtx, ft: &FunctionTable) -> Result<(BiPoly, BiPoly)> {
    let quad = QuadExt::new(ctx)?;
    let q = ctx.q() as usize;
    let sub = ctx.subfield_elems();
    let lag: Vec<Vec<FFElt>> = sub.iter().map(|&a| lagrange_coeffs(ctx, a)).collect();

    let mut f1 = BiPoly::zero(q);
    let mut f2 = BiPoly::zero(q);
    for (i, &x1) in sub.iter().enumerate() {
        for (j, &x2) in sub.iter().enumerate() {
            let y = ft.get(quad.compose(ctx, x1, x2));
            let (y1, y2) = quad.coords(y);
            for (part, v) in [(&mut f1, sub[y1]), (&mut f2, sub[y2])] {
                if v.is_zero() {
                    continue;
                }
                for r in 0..q {
                    let vr = ctx.mul(v, lag[i][r]);
                    if vr.is_zero() {
                        continue;
                    }
                    for s in 0..q {
                        let add = ctx.mul(vr, lag[j][s]);
                        part.set(r, s, ctx.add(part.get(r, s), add));
                    }
                }
            }
        }
    }
    Ok((f1, f2))
}

/// Product reduced modulo (x1^q - x1, x2^q - x2): per variable, an exponent
/// e ≥ q folds to e - (q - 1).
pub fn bipoly_mul_reduce(ctx: &FieldCtx, a: &BiPoly, b: &BiPoly) -> BiPoly {
    assert_eq!(a.q, b.q, "mixed grid sizes");
    let q = a.q;
    let w = 2 * q - 1;
    let mut raw = vec![FFElt::ZERO; w * w];
    for i1 in 0..q {
        for j1 in 0..q {
            let c1 = a.get(i1, j1);
            if c1.is_zero() {
                continue;
            }
            for i2 in 0..q {
                for j2 in 0..q {
                    let c2 = b.get(i2, j2);
                    if c2.is_zero() {
                        continue;
                    }
                    let slot = (i1 + i2) * w + (j1 + j2);
                    raw[slot] = ctx.add(raw[slot], ctx.mul(c1, c2));
                }
            }
        }
    }
    let fold = |e: usize| if e < q { e } else { e - (q - 1) };
    let mut out = BiPoly::zero(q);
    for i in 0..w {
        for j in 0..w {
            let c = raw[i * w + j];
            if !c.is_zero() {
                let (fi, fj) = (fold(i), fold(j));
                out.set(fi, fj, ctx.add(out.get(fi, fj), c));
            }
        }
    }
    out
}

fn bipoly_pow(ctx: &FieldCtx, base: &BiPoly, t: u64) -> BiPoly {
    let mut acc = BiPoly::zero(base.q);
    acc.set(0, 0, FFElt::ONE);
    for _ in 0..t {
        acc = bipoly_mul_reduce(ctx, &acc, base);
    }
    acc
}

/// Coefficient of x1^(q-1) x2^(q-1) in the reduction of f1^t1 · f2^t2.
pub fn hermite_coefficient(
    ctx: &FieldCtx,
    f1: &BiPoly,
    f2: &BiPoly,
    t1: u64,
    t2: u64,
) -> FFElt {
    let prod = bipoly_mul_reduce(ctx, &bipoly_pow(ctx, f1, t1), &bipoly_pow(ctx, f2, t2));
    let q = f1.q;
    prod.get(q - 1, q - 1)
}

/// First failing exponent pair, or None when the system is orthogonal.
/// (q-1, q-1) means the top coefficient vanished; any other pair is a
/// nonzero coefficient that should have been zero. Powers of f1 and f2 are
/// cached incrementally across the scan.
pub fn orthogonality_failure(ctx: &FieldCtx, f1: &BiPoly, f2: &BiPoly) -> Option<(u64, u64)> {
    assert_eq!(f1.q, f2.q, "mixed grid sizes");
    let q = f1.q;
    let p = ctx.p();

    let mut f1_pows = Vec::with_capacity(q);
    let mut f2_pows = Vec::with_capacity(q);
    let mut one = BiPoly::zero(q);
    one.set(0, 0, FFElt::ONE);
    f1_pows.push(one.clone());
    f2_pows.push(one);
    for t in 1..q {
        f1_pows.push(bipoly_mul_reduce(ctx, &f1_pows[t - 1], f1));
        f2_pows.push(bipoly_mul_reduce(ctx, &f2_pows[t - 1], f2));
    }
    let coeff_at = |t1: usize, t2: usize| {
        bipoly_mul_reduce(ctx, &f1_pows[t1], &f2_pows[t2]).get(q - 1, q - 1)
    };

    if coeff_at(q - 1, q - 1).is_zero() {
        return Some(((q - 1) as u64, (q - 1) as u64));
    }
    for t1 in 0..q {
        for t2 in 0..q {
            if t1 == q - 1 && t2 == q - 1 {
                continue;
            }
            if (t1 as u64) % p == 0 && (t2 as u64) % p == 0 {
                continue;
            }
            if !coeff_at(t1, t2).is_zero() {
                return Some((t1 as u64, t2 as u64));
            }
        }
    }
    None
}

/// Both coefficient conditions: the top coefficient of f1^(q-1) f2^(q-1) is
/// nonzero, and every other admissible pair gives zero.
pub fn orthogonal_test(ctx: &FieldCtx, f1: &BiPoly, f2: &BiPoly) -> bool {
    orthogonality_failure(ctx, f1, f2).is_none()
}

/// Direct bijection check of (x1, x2) ↦ (f1, f2) on F_q × F_q.
pub fn system_is_bijection(ctx: &FieldCtx, f1: &BiPoly, f2: &BiPoly) -> bool {
    let q = f1.q;
    let sub = ctx.subfield_elems();
    let pos: std::collections::HashMap<FFElt, usize> =
        sub.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut seen = Bitmap::new(q * q);
    for &x1 in sub {
        for &x2 in sub {
            let v1 = f1.eval(ctx, x1, x2);
            let v2 = f2.eval(ctx, x1, x2);
            if !seen.set(pos[&v1] * q + pos[&v2]) {
                return false;
            }
        }
    }
    true
}
