//! Field tower F_p ⊆ F_q ⊆ F_{q^n} with q = p^k.
//!
//! The tower is realized as a single extension F_{p^m}, m = k·n, over the
//! lexicographically least monic irreducible modulus of degree m. The middle
//! field F_q is the fixed-point set of the q-power Frobenius, so subfield
//! elements are ordinary big-field elements and mixed expressions like
//! (y-x)/(b-c) need no conversions.
//!
//! Elements are identified by an integer index: the little-endian base-p
//! encoding of the coefficient vector modulo the modulus. Index 0 is the
//! additive identity, index 1 the multiplicative identity, and for c < p
//! index c is the prime-field constant c.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on p^m; all value tables are O(p^m).
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Exp/log multiplication tables are built for fields up to this size.
const EXPLOG_CAP: u64 = 1 << 16;

/// One element of the big field, identified by its canonical index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FFElt(pub u64);

impl FFElt {
    pub const ZERO: FFElt = FFElt(0);
    pub const ONE: FFElt = FFElt(1);

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FFElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable description of a field, carried in every report header so
/// element indices are reproducible bit-exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
    pub n: u32,
    pub modulus: Vec<u64>,
}

struct ExpLog {
    /// exp[i] = g^i for a fixed generator g, i in [0, size-1).
    exp: Vec<u64>,
    /// log[x] = discrete log of x base g; log[0] is unused.
    log: Vec<u64>,
}

/// Immutable description of the tower, shared read-only by all workers.
pub struct FieldCtx {
    p: u64,
    k: u32,
    n: u32,
    m: u32,
    q: u64,
    size: u64,
    modulus: Vec<u64>,
    subfield_elems: Vec<FFElt>,
    frob_k_table: Vec<FFElt>,
    explog: Option<ExpLog>,
}

impl FieldCtx {
    /// Builds the tower with the default desk-scale cap.
    pub fn build(p: u64, k: u32, n: u32) -> Result<FieldCtx> {
        Self::build_with_cap(p, k, n, DEFAULT_CAP)
    }

    pub fn build_with_cap(p: u64, k: u32, n: u32, cap: u64) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || n == 0 {
            return Err(Error::BadParameters("k and n must be positive".into()));
        }
        let m = k
            .checked_mul(n)
            .ok_or_else(|| Error::BadParameters("k*n overflows".into()))?;
        let size = checked_pow(p, m).ok_or(Error::CapExceeded { size: u64::MAX, cap })?;
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        let q = p.pow(k);

        let modulus = lex_least_irreducible(p, m);
        let mut ctx = FieldCtx {
            p,
            k,
            n,
            m,
            q,
            size,
            modulus,
            subfield_elems: Vec::new(),
            frob_k_table: Vec::new(),
            explog: None,
        };
        if size <= EXPLOG_CAP {
            ctx.explog = Some(ctx.build_explog());
        }
        ctx.frob_k_table = ctx.build_frob_table();
        ctx.subfield_elems = (0..size)
            .map(FFElt)
            .filter(|&x| ctx.frob_k_table[x.idx()] == x)
            .collect();
        assert_eq!(
            ctx.subfield_elems.len() as u64,
            q,
            "fixed-point count of the q-power Frobenius must be q"
        );
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Order of the middle field, q = p^k.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Order of the big field, q^n = p^m.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Elements of the canonical copy of F_q, sorted by index.
    pub fn subfield_elems(&self) -> &[FFElt] {
        &self.subfield_elems
    }

    pub fn field_spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            k: self.k,
            n: self.n,
            modulus: self.modulus.clone(),
        }
    }

    /// All elements in index order.
    pub fn elems(&self) -> impl Iterator<Item = FFElt> {
        (0..self.size).map(FFElt)
    }

    /// Validates an externally supplied index.
    pub fn elem_checked(&self, idx: u64) -> Result<FFElt> {
        if idx < self.size {
            Ok(FFElt(idx))
        } else {
            Err(Error::Parse(format!(
                "element index {idx} out of range for field of size {}",
                self.size
            )))
        }
    }

    /// Embeds a prime-field constant c < p.
    pub fn scalar(&self, c: u64) -> FFElt {
        debug_assert!(c < self.p);
        FFElt(c % self.p)
    }

    #[inline]
    pub fn add(&self, a: FFElt, b: FFElt) -> FFElt {
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut pw = 1u64;
        while x > 0 || y > 0 {
            let s = (x % p + y % p) % p;
            out += s * pw;
            pw *= p;
            x /= p;
            y /= p;
        }
        FFElt(out)
    }

    #[inline]
    pub fn neg(&self, a: FFElt) -> FFElt {
        let p = self.p;
        let mut x = a.0;
        let mut out = 0u64;
        let mut pw = 1u64;
        while x > 0 {
            let d = x % p;
            if d != 0 {
                out += (p - d) * pw;
            }
            pw *= p;
            x /= p;
        }
        FFElt(out)
    }

    #[inline]
    pub fn sub(&self, a: FFElt, b: FFElt) -> FFElt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FFElt, b: FFElt) -> FFElt {
        if a.is_zero() || b.is_zero() {
            return FFElt::ZERO;
        }
        match &self.explog {
            Some(t) => {
                let ord = self.size - 1;
                FFElt(t.exp[((t.log[a.idx()] + t.log[b.idx()]) % ord) as usize])
            }
            None => self.mul_poly(a, b),
        }
    }

    pub fn inv(&self, a: FFElt) -> Result<FFElt> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.explog {
            Some(t) => {
                let ord = self.size - 1;
                Ok(FFElt(t.exp[((ord - t.log[a.idx()]) % ord) as usize]))
            }
            None => Ok(self.pow(a, self.size - 2)),
        }
    }

    pub fn pow(&self, a: FFElt, e: u64) -> FFElt {
        if e == 0 {
            return FFElt::ONE;
        }
        if a.is_zero() {
            return FFElt::ZERO;
        }
        if let Some(t) = &self.explog {
            let ord = self.size - 1;
            let l = t.log[a.idx()] % ord;
            return FFElt(t.exp[((l * (e % ord)) % ord) as usize]);
        }
        let mut base = a;
        let mut e = e;
        let mut acc = FFElt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// The q-power Frobenius x ↦ x^q, via the precomputed table.
    #[inline]
    pub fn frob_q(&self, x: FFElt) -> FFElt {
        self.frob_k_table[x.idx()]
    }

    /// Relative trace Tr(x) = x + x^q + ... + x^{q^(n-1)}; lands in F_q.
    pub fn rel_trace(&self, x: FFElt) -> FFElt {
        let mut acc = x;
        let mut cur = x;
        for _ in 1..self.n {
            cur = self.frob_q(cur);
            acc = self.add(acc, cur);
        }
        acc
    }

    /// Membership in the canonical F_q, i.e. x^q = x.
    #[inline]
    pub fn in_subfield(&self, x: FFElt) -> bool {
        self.frob_k_table[x.idx()] == x
    }

    /// Least-index quadratic non-residue of the F_q subfield.
    pub fn find_nonresidue(&self) -> Result<FFElt> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        let e = (self.q - 1) / 2;
        self.subfield_elems
            .iter()
            .copied()
            .filter(|u| !u.is_zero())
            .find(|&u| self.pow(u, e) != FFElt::ONE)
            .ok_or_else(|| unreachable!("odd q always has a non-residue"))
    }

    /// Direct polynomial multiplication modulo the field modulus. Used when
    /// no exp/log tables exist, and as the reference path the tables are
    /// checked against.
    pub(crate) fn mul_poly(&self, a: FFElt, b: FFElt) -> FFElt {
        let m = self.m as usize;
        let p = self.p;
        let mut da = vec![0u64; m];
        let mut db = vec![0u64; m];
        self.digits_into(a.0, &mut da);
        self.digits_into(b.0, &mut db);

        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // t^m = -(modulus[0] + modulus[1] t + ... + modulus[m-1] t^(m-1))
        for i in (m..2 * m - 1).rev() {
            let c = prod[i];
            if c != 0 {
                prod[i] = 0;
                for j in 0..m {
                    let red = self.modulus[j];
                    if red != 0 {
                        prod[i - m + j] = (prod[i - m + j] + c * (p - red)) % p;
                    }
                }
            }
        }
        FFElt(self.compose(&prod[..m]))
    }

    #[inline]
    fn digits_into(&self, mut x: u64, out: &mut [u64]) {
        for d in out.iter_mut() {
            *d = x % self.p;
            x /= self.p;
        }
    }

    #[inline]
    fn compose(&self, digs: &[u64]) -> u64 {
        digs.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn build_explog(&self) -> ExpLog {
        let size = self.size;
        let ord = (size - 1) as usize;
        if ord == 1 {
            return ExpLog {
                exp: vec![1],
                log: vec![0, 0],
            };
        }
        'candidates: for g in 2..size {
            let g = FFElt(g);
            let mut exp = vec![0u64; ord];
            exp[0] = 1;
            let mut acc = FFElt::ONE;
            for slot in exp.iter_mut().skip(1) {
                acc = self.mul_poly(acc, g);
                if acc == FFElt::ONE {
                    continue 'candidates;
                }
                *slot = acc.0;
            }
            let mut log = vec![0u64; size as usize];
            for (i, &x) in exp.iter().enumerate() {
                log[x as usize] = i as u64;
            }
            return ExpLog { exp, log };
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }

    /// Frobenius x ↦ x^{p^k} as an F_p-linear map: the matrix of x ↦ x^p on
    /// the power basis, raised to the k-th power, then applied to every
    /// element's digit vector.
    fn build_frob_table(&self) -> Vec<FFElt> {
        let m = self.m as usize;
        let p = self.p;

        // column j = digits of (t^j)^p
        let mut mat = vec![vec![0u64; m]; m];
        for j in 0..m {
            let basis = FFElt(checked_pow(p, j as u32).expect("basis index fits"));
            let image = self.pow(basis, p);
            let mut digs = vec![0u64; m];
            self.digits_into(image.0, &mut digs);
            for (r, row) in mat.iter_mut().enumerate() {
                row[j] = digs[r];
            }
        }
        let mut mk = identity_matrix(m);
        for _ in 0..self.k {
            mk = mat_mul(&mk, &mat, p);
        }

        let mut table = Vec::with_capacity(self.size as usize);
        let mut digs = vec![0u64; m];
        for x in 0..self.size {
            self.digits_into(x, &mut digs);
            let mut out = vec![0u64; m];
            for (r, row) in mk.iter().enumerate() {
                let mut acc = 0u64;
                for (c, &coef) in row.iter().enumerate() {
                    acc += coef * digs[c];
                }
                out[r] = acc % p;
            }
            table.push(FFElt(self.compose(&out)));
        }
        table
    }
}

fn identity_matrix(m: usize) -> Vec<Vec<u64>> {
    let mut id = vec![vec![0u64; m]; m];
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = 1;
    }
    id
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let m = a.len();
    let mut out = vec![vec![0u64; m]; m];
    for r in 0..m {
        for c in 0..m {
            let mut acc = 0u64;
            for i in 0..m {
                acc = (acc + a[r][i] * b[i][c]) % p;
            }
            out[r][c] = acc;
        }
    }
    out
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Remainder of a modulo the monic divisor b, coefficients little-endian mod p.
fn poly_rem_in_place(a: &mut Vec<u64>, b: &[u64], p: u64) {
    while a.len() >= b.len() {
        let c = *a.last().unwrap();
        if c != 0 {
            let sh = a.len() - b.len();
            for (j, &bc) in b.iter().enumerate().take(b.len() - 1) {
                if bc != 0 {
                    a[sh + j] = (a[sh + j] + (p - (c * bc) % p)) % p;
                }
            }
        }
        a.pop();
    }
    while matches!(a.last(), Some(0)) {
        a.pop();
    }
}

/// Irreducibility over F_p by trial division against every monic polynomial
/// of degree at most m/2.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        let count = p.pow(d as u32);
        let mut b = vec![0u64; d + 1];
        b[d] = 1;
        for code in 0..count {
            let mut t = code;
            for slot in b.iter_mut().take(d) {
                *slot = t % p;
                t /= p;
            }
            let mut r = f.to_vec();
            poly_rem_in_place(&mut r, &b, p);
            if r.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree m over F_p, with
/// coefficients compared low-degree first. The search space is finite and
/// nonempty, so this always terminates with a result.
fn lex_least_irreducible(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    let total = p.pow(m as u32);
    let mut f = vec![0u64; m + 1];
    f[m] = 1;
    for code in 0..total {
        let mut t = code;
        // c_0 is the most significant digit of code, so increasing code
        // enumerates coefficient vectors in low-degree-first lex order.
        for i in (0..m).rev() {
            f[i] = t % p;
            t /= p;
        }
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}
