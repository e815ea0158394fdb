//! Prime fields `F_q`, the quadratic extension `F_q[sqrt(alpha)]`, the two
//! cyclic groups `SO(2, F_q)` (split and anisotropic), block-diagonal
//! holonomy elements assembled from them, and the reduction of integer
//! characteristic polynomials mod `p`.
//!
//! Polynomials are little-endian coefficient vectors with residues in
//! `[0, q)`; characteristic polynomials are `det(t I - M)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn check_odd_prime(q: u64) -> Result<()> {
    if q == 2 || !is_prime(q) || q > u32::MAX as u64 {
        return Err(Error::NonPrimeModulus(q));
    }
    Ok(())
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, q: u64) -> u64 {
    pow_mod(a, q - 2, q)
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// An element of `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FqElement {
    pub value: u64,
    pub modulus: u64,
}

impl FqElement {
    pub fn new(value: i128, modulus: u64) -> Self {
        Self {
            value: value.rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }

    pub fn inverse(self) -> Self {
        Self {
            value: inv_mod(self.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn pow(self, e: u64) -> Self {
        Self {
            value: pow_mod(self.value, e, self.modulus),
            modulus: self.modulus,
        }
    }

    /// Multiplicative order (0 for zero).
    pub fn order(self) -> u64 {
        if self.value == 0 {
            return 0;
        }
        let n = self.modulus - 1;
        prime_factors(n).into_iter().fold(n, |mut ord, p| {
            while ord % p == 0 && pow_mod(self.value, ord / p, self.modulus) == 1 {
                ord /= p;
            }
            ord
        })
    }
}

/// Smallest positive generator of `F_q^x`.
pub fn find_generator(q: u64) -> Result<u64> {
    check_odd_prime(q)?;
    let factors = prime_factors(q - 1);
    Ok((2..q)
        .find(|&g| factors.iter().all(|&p| pow_mod(g, (q - 1) / p, q) != 1))
        .expect("F_q^x is cyclic"))
}

pub fn is_residue(a: u64, q: u64) -> bool {
    a % q == 0 || pow_mod(a, (q - 1) / 2, q) == 1
}

pub fn smallest_nonresidue(q: u64) -> Result<u64> {
    check_odd_prime(q)?;
    Ok((2..q)
        .find(|&a| !is_residue(a, q))
        .expect("half the units are non-residues"))
}

/// `a + b sqrt(alpha)` in `F_q[sqrt(alpha)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadExtElement {
    pub a: u64,
    pub b: u64,
    pub alpha: u64,
    pub modulus: u64,
}

impl QuadExtElement {
    pub fn new(a: u64, b: u64, alpha: u64, modulus: u64) -> Self {
        Self {
            a: a % modulus,
            b: b % modulus,
            alpha,
            modulus,
        }
    }

    pub fn one(alpha: u64, modulus: u64) -> Self {
        Self::new(1, 0, alpha, modulus)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn mul(&self, o: &Self) -> Self {
        let q = self.modulus;
        let a = (mul_mod(self.a, o.a, q) + mul_mod(mul_mod(self.b, o.b, q), self.alpha, q)) % q;
        let b = (mul_mod(self.a, o.b, q) + mul_mod(self.b, o.a, q)) % q;
        Self { a, b, ..*self }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.alpha, self.modulus);
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn conjugate(&self) -> Self {
        Self {
            b: (self.modulus - self.b) % self.modulus,
            ..*self
        }
    }

    /// `a^2 - alpha b^2`.
    pub fn norm(&self) -> u64 {
        let q = self.modulus;
        (mul_mod(self.a, self.a, q) + q - mul_mod(self.alpha, mul_mod(self.b, self.b, q), q)) % q
    }

    /// Multiplicative order in `F_{q^2}^x` (0 for zero).
    pub fn order(&self) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let n = self.modulus * self.modulus - 1;
        prime_factors(n).into_iter().fold(n, |mut ord, p| {
            while ord % p == 0 && self.pow(ord / p) == Self::one(self.alpha, self.modulus) {
                ord /= p;
            }
            ord
        })
    }

    pub fn inverse(&self) -> Self {
        self.pow(self.modulus * self.modulus - 2)
    }
}

/// `(alpha, lambda_{q,2})`: `alpha` is the smallest non-residue and
/// `lambda_{q,2} = gamma^{q-1}` for the first generator `gamma` of
/// `F_{q^2}^x` in the order `a + b q` of `a + b sqrt(alpha)`. It has norm one
/// and order exactly `q + 1`.
pub fn norm_one_generator(q: u64) -> Result<(u64, QuadExtElement)> {
    let alpha = smallest_nonresidue(q)?;
    let full = q * q - 1;
    let gamma = (0..q)
        .flat_map(|b| (0..q).map(move |a| (a, b)))
        .map(|(a, b)| QuadExtElement::new(a, b, alpha, q))
        .find(|x| !x.is_zero() && x.order() == full)
        .expect("F_{q^2}^x is cyclic");
    Ok((alpha, gamma.pow(q - 1)))
}

/// Square matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FqMatrix {
    pub modulus: u64,
    pub size: usize,
    pub entries: Vec<u64>,
}

impl FqMatrix {
    pub fn from_rows(modulus: u64, rows: &[Vec<i64>]) -> Self {
        let size = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                r.iter()
                    .map(|&v| (v as i128).rem_euclid(modulus as i128) as u64)
            })
            .collect();
        Self {
            modulus,
            size,
            entries,
        }
    }

    pub fn identity(modulus: u64, size: usize) -> Self {
        let mut entries = vec![0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1 % modulus;
        }
        Self {
            modulus,
            size,
            entries,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size + j]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.size;
        let q = self.modulus;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] = (entries[i * n + j] + mul_mod(a, o.get(k, j), q)) % q;
                }
            }
        }
        Self {
            modulus: q,
            size: n,
            entries,
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let entries = (0..n * n).map(|idx| self.get(idx % n, idx / n)).collect();
        Self {
            modulus: self.modulus,
            size: n,
            entries,
        }
    }

    pub fn det(&self) -> u64 {
        det_mod(&self.entries, self.size, self.modulus)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[FqMatrix]) -> Self {
        let modulus = blocks[0].modulus;
        let size = blocks.iter().map(|b| b.size).sum();
        let mut entries = vec![0; size * size];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.size {
                for j in 0..b.size {
                    entries[(off + i) * size + off + j] = b.get(i, j);
                }
            }
            off += b.size;
        }
        Self {
            modulus,
            size,
            entries,
        }
    }

    /// `det(t I - M)`, little-endian.
    pub fn charpoly(&self) -> Vec<u64> {
        let q = self.modulus as i128;
        let a: Vec<i128> = self.entries.iter().map(|&v| v as i128).collect();
        berkowitz(&a, self.size, |x| x.rem_euclid(q))
            .iter()
            .map(|&c| c as u64)
            .collect()
    }
}

fn det_mod(entries: &[u64], n: usize, q: u64) -> u64 {
    let mut m = entries.to_vec();
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r * n + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            det = (q - det) % q;
        }
        let p = m[col * n + col];
        det = mul_mod(det, p, q);
        let pinv = inv_mod(p, q);
        for r in col + 1..n {
            let f = mul_mod(m[r * n + col], pinv, q);
            if f == 0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] = (m[r * n + j] + q - mul_mod(f, m[col * n + j], q)) % q;
            }
        }
    }
    det
}

/// Division-free characteristic polynomial `det(t I - A)` (little-endian),
/// with `reduce` applied after every ring operation.
fn berkowitz(a: &[i128], n: usize, reduce: impl Fn(i128) -> i128) -> Vec<i128> {
    let at = |i: usize, j: usize| a[i * n + j];
    // high-to-low coefficients of the leading r x r block
    let mut c: Vec<i128> = vec![1];
    for r in 0..n {
        // column S = A[0..r][r], row R = A[r][0..r]
        let mut t = vec![1, reduce(-at(r, r))];
        let mut v: Vec<i128> = (0..r).map(|i| at(i, r)).collect();
        for _ in 0..r {
            let rs = (0..r).fold(0, |acc, j| reduce(acc + reduce(at(r, j) * v[j])));
            t.push(reduce(-rs));
            v = (0..r)
                .map(|i| (0..r).fold(0, |acc, j| reduce(acc + reduce(at(i, j) * v[j]))))
                .collect();
        }
        let mut next = vec![0; r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if i >= j && i - j < t.len() {
                    *slot = reduce(*slot + reduce(t[i - j] * cj));
                }
            }
        }
        c = next;
    }
    c.reverse();
    c
}

fn eval_poly(p: &[u64], x: u64, q: u64) -> u64 {
    p.iter()
        .rev()
        .fold(0, |acc, &c| (mul_mod(acc, x, q) + c) % q)
}

/// Quotient of `p` by `(t - root)` (exact division assumed).
fn deflate(p: &[u64], root: u64, q: u64) -> Vec<u64> {
    let deg = p.len() - 1;
    let mut out = vec![0; deg];
    let mut carry = 0;
    for i in (1..=deg).rev() {
        carry = (p[i] + mul_mod(carry, root, q)) % q;
        out[i - 1] = carry;
    }
    out
}

/// Roots in `F_q` with multiplicity, and the cofactor with no roots.
pub fn factor_linear(p: &[u64], q: u64) -> (BTreeMap<u64, usize>, Vec<u64>) {
    let mut rest = p.to_vec();
    let mut roots = BTreeMap::new();
    for x in 0..q {
        while rest.len() > 1 && eval_poly(&rest, x, q) == 0 {
            rest = deflate(&rest, x, q);
            *roots.entry(x).or_insert(0) += 1;
        }
    }
    (roots, rest)
}

fn eval_in_extension(p: &[u64], x: &QuadExtElement) -> QuadExtElement {
    p.iter()
        .rev()
        .fold(QuadExtElement::new(0, 0, x.alpha, x.modulus), |acc, &c| {
            let m = acc.mul(x);
            QuadExtElement::new(m.a + c, m.b, x.alpha, x.modulus)
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FormVariant {
    HyperbolicPlane,
    Anisotropic { alpha: u64 },
    OddDim(usize),
    EvenPlus(usize),
    EvenMinus(usize),
}

/// A nondegenerate symmetric bilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormSpec {
    pub variant: FormVariant,
    pub gram: FqMatrix,
}

impl FormSpec {
    /// `[[0, 1], [1, 0]]`: the split plane, isotropic for every `q`.
    pub fn hyperbolic_plane(q: u64) -> Self {
        Self {
            variant: FormVariant::HyperbolicPlane,
            gram: FqMatrix::from_rows(q, &[vec![0, 1], vec![1, 0]]),
        }
    }

    /// `diag(1, -alpha)`, the norm form of `F_q[sqrt(alpha)]`; anisotropic
    /// because `alpha` is a non-residue.
    pub fn anisotropic(q: u64, alpha: u64) -> Self {
        Self {
            variant: FormVariant::Anisotropic { alpha },
            gram: FqMatrix::from_rows(q, &[vec![1, 0], vec![0, -(alpha as i64)]]),
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.det() != 0 && self.gram.transpose() == self.gram
    }
}

pub fn preserves_form(m: &FqMatrix, gram: &FqMatrix) -> bool {
    m.transpose().mul(gram).mul(m) == *gram
}

/// `diag(lambda_q, lambda_q^{-1})` for the split plane, multiplication by
/// `lambda_{q,2}` on the basis `{1, sqrt(alpha)}` for the anisotropic one.
pub fn so_block_element(variant: FormVariant, q: u64) -> Result<(FqMatrix, FormSpec)> {
    check_odd_prime(q)?;
    match variant {
        FormVariant::HyperbolicPlane => {
            let g = find_generator(q)?;
            let m = FqMatrix::from_rows(q, &[vec![g as i64, 0], vec![0, inv_mod(g, q) as i64]]);
            Ok((m, FormSpec::hyperbolic_plane(q)))
        }
        FormVariant::Anisotropic { .. } => {
            let (alpha, lambda) = norm_one_generator(q)?;
            let (a, b) = (lambda.a as i64, lambda.b as i64);
            let m = FqMatrix::from_rows(q, &[vec![a, alpha as i64 * b], vec![b, a]]);
            Ok((m, FormSpec::anisotropic(q, alpha)))
        }
        other => Err(Error::InvalidParameter(format!(
            "{other:?} is not a two-dimensional block"
        ))),
    }
}

/// Least `s <= bound` with `m^s = I`.
pub fn element_order(m: &FqMatrix, bound: u64) -> Option<u64> {
    let id = FqMatrix::identity(m.modulus, m.size);
    let mut power = m.clone();
    for s in 1..=bound {
        if power == id {
            return Some(s);
        }
        power = power.mul(m);
    }
    None
}

pub fn default_order_bound(q: u64) -> u64 {
    q * q
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCertificate {
    pub charpoly: Vec<u64>,
    /// Roots in `F_q` with multiplicity.
    pub roots: Vec<(u64, usize)>,
    /// Root-free cofactor of the characteristic polynomial.
    pub irreducible_factor: Vec<u64>,
    /// Roots of the cofactor in `F_{q^2}`, when it is a quadratic.
    pub extension_roots: Vec<QuadExtElement>,
    pub expected_roots: Vec<(u64, usize)>,
    pub expected_extension_roots: Vec<QuadExtElement>,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyElement {
    pub variant: FormVariant,
    pub modulus: u64,
    pub matrix: FqMatrix,
    pub form: FormSpec,
    pub certificate: EigenCertificate,
}

/// Block-diagonal element with eigenvalues `lambda_q^{+-1}` (n each, plus a
/// 1 for odd dimension), or `n - 1` split blocks and one anisotropic block
/// with eigenvalues `lambda_{q,2}^{+-1}`.
pub fn assemble_holonomy_element(variant: FormVariant, q: u64) -> Result<HolonomyElement> {
    check_odd_prime(q)?;
    let (split, anisotropic, unit) = match variant {
        FormVariant::OddDim(n) if n >= 1 => (n, false, true),
        FormVariant::EvenPlus(n) if n >= 1 => (n, false, false),
        FormVariant::EvenMinus(n) if n >= 1 => (n - 1, true, false),
        other => {
            return Err(Error::InvalidParameter(format!(
                "cannot assemble {other:?}"
            )))
        }
    };
    let (h, hform) = so_block_element(FormVariant::HyperbolicPlane, q)?;
    let mut blocks = vec![h; split];
    let mut grams = vec![hform.gram; split];
    let mut expected_ext = vec![];
    if anisotropic {
        let (a, aform) = so_block_element(FormVariant::Anisotropic { alpha: 0 }, q)?;
        let (_, lambda) = norm_one_generator(q)?;
        expected_ext = vec![lambda, lambda.inverse()];
        blocks.push(a);
        grams.push(aform.gram);
    }
    if unit {
        blocks.push(FqMatrix::identity(q, 1));
        grams.push(FqMatrix::identity(q, 1));
    }
    let matrix = FqMatrix::direct_sum(&blocks);
    let form = FormSpec {
        variant,
        gram: FqMatrix::direct_sum(&grams),
    };

    let g = find_generator(q)?;
    let mut expected: BTreeMap<u64, usize> = BTreeMap::new();
    *expected.entry(g).or_insert(0) += split;
    *expected.entry(inv_mod(g, q)).or_insert(0) += split;
    if unit {
        *expected.entry(1).or_insert(0) += 1;
    }
    expected.retain(|_, m| *m > 0);

    let charpoly = matrix.charpoly();
    let (roots, rest) = factor_linear(&charpoly, q);
    let mut extension_roots = vec![];
    if rest.len() == 3 {
        let (_, lambda) = norm_one_generator(q)?;
        for x in [lambda, lambda.inverse()] {
            if eval_in_extension(&rest, &x).is_zero() {
                extension_roots.push(x);
            }
        }
    }
    let matches =
        roots == expected && extension_roots == expected_ext && (rest.len() == 1) != anisotropic;
    let certificate = EigenCertificate {
        charpoly,
        roots: roots.into_iter().collect(),
        irreducible_factor: rest,
        extension_roots,
        expected_roots: expected.into_iter().collect(),
        expected_extension_roots: expected_ext,
        matches,
    };
    Ok(HolonomyElement {
        variant,
        modulus: q,
        matrix,
        form,
        certificate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionCheck {
    pub prime: u64,
    /// Integer characteristic polynomial, little-endian.
    pub integer_charpoly: Vec<i128>,
    pub reduced: Vec<u64>,
    /// Characteristic polynomial of the reduced matrix over `F_p`.
    pub over_field: Vec<u64>,
    pub equal: bool,
}

/// Reduces the integer characteristic polynomial of `g` mod `p` and compares
/// it with the characteristic polynomial of `g mod p`, the latter found by
/// interpolating `det(t I - g)` over `F_p` (Berkowitz mod `p` when `p` is
/// too small to interpolate).
pub fn charpoly_reduction_check(g: &[Vec<i64>], p: u64) -> Result<ReductionCheck> {
    if !is_prime(p) {
        return Err(Error::NonPrimeModulus(p));
    }
    let n = g.len();
    if let Some(row) = g.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(row.len(), n));
    }
    let flat: Vec<i128> = g
        .iter()
        .flat_map(|r| r.iter().map(|&v| v as i128))
        .collect();
    let bound = flat.iter().fold(1i128, |m, v| m.max(v.abs())) * n.max(1) as i128;
    if (bound as f64).powi(n as i32) > 1e36 {
        return Err(Error::InvalidParameter(
            "integer characteristic polynomial would overflow".into(),
        ));
    }
    let integer_charpoly = berkowitz(&flat, n, |x| x);
    let reduced: Vec<u64> = integer_charpoly
        .iter()
        .map(|c| c.rem_euclid(p as i128) as u64)
        .collect();
    let m = FqMatrix::from_rows(p, g);
    let over_field = if (p as usize) > n {
        interpolate_charpoly(&m)
    } else {
        m.charpoly()
    };
    Ok(ReductionCheck {
        prime: p,
        equal: reduced == over_field,
        integer_charpoly,
        reduced,
        over_field,
    })
}

/// `det(t I - M)` sampled at `t = 0..=n` and interpolated (Lagrange) over `F_p`.
fn interpolate_charpoly(m: &FqMatrix) -> Vec<u64> {
    let (n, p) = (m.size, m.modulus);
    let values: Vec<u64> = (0..=n as u64)
        .map(|t| {
            let shifted: Vec<u64> = (0..n * n)
                .map(|idx| {
                    let diag = if idx / n == idx % n { t } else { 0 };
                    (diag + p - m.entries[idx]) % p
                })
                .collect();
            det_mod(&shifted, n, p)
        })
        .collect();
    let mut out = vec![0u64; n + 1];
    for (i, &yi) in values.iter().enumerate() {
        // basis polynomial prod_{j != i} (t - j) / (i - j)
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for j in 0..=n {
            if j == i {
                continue;
            }
            let mut next = vec![0u64; basis.len() + 1];
            for (k, &c) in basis.iter().enumerate() {
                next[k + 1] = (next[k + 1] + c) % p;
                next[k] = (next[k] + p - mul_mod(c, j as u64 % p, p)) % p;
            }
            basis = next;
            denom = mul_mod(denom, (i as u64 + p - j as u64 % p) % p, p);
        }
        let scale = mul_mod(yi, inv_mod(denom, p), p);
        for (k, c) in basis.iter().enumerate() {
            out[k] = (out[k] + mul_mod(*c, scale, p)) % p;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldReport {
    pub q: u64,
    pub generator: u64,
    pub nonresidue: u64,
    pub norm_one_generator: QuadExtElement,
    pub split_block: FqMatrix,
    pub split_order: Option<u64>,
    pub anisotropic_block: FqMatrix,
    pub anisotropic_gram: FqMatrix,
    pub anisotropic_order: Option<u64>,
    pub forms_preserved: bool,
    /// `diag(1, 1)` represents zero nontrivially iff `-1` is a square,
    /// i.e. `q = 1 mod 4`.
    pub identity_form_isotropic: bool,
    pub elements: Vec<HolonomyElement>,
}

pub fn field_report(q: u64, n: usize) -> Result<FieldReport> {
    check_odd_prime(q)?;
    let (alpha, lambda) = norm_one_generator(q)?;
    let (split, hform) = so_block_element(FormVariant::HyperbolicPlane, q)?;
    let (aniso, aform) = so_block_element(FormVariant::Anisotropic { alpha }, q)?;
    let bound = default_order_bound(q);
    let elements = [
        FormVariant::OddDim(n),
        FormVariant::EvenPlus(n),
        FormVariant::EvenMinus(n),
    ]
    .into_iter()
    .map(|v| assemble_holonomy_element(v, q))
    .collect::<Result<Vec<_>>>()?;
    Ok(FieldReport {
        q,
        generator: find_generator(q)?,
        nonresidue: alpha,
        norm_one_generator: lambda,
        split_order: element_order(&split, bound),
        anisotropic_order: element_order(&aniso, bound),
        forms_preserved: preserves_form(&split, &hform.gram)
            && preserves_form(&aniso, &aform.gram)
            && elements
                .iter()
                .all(|e| preserves_form(&e.matrix, &e.form.gram)),
        split_block: split,
        anisotropic_block: aniso,
        anisotropic_gram: aform.gram,
        identity_form_isotropic: is_residue(q - 1, q),
        elements,
    })
}
