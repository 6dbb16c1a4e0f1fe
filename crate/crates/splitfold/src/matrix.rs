//! Exact nonnegative integer matrices, Boolean powers, Perron-Frobenius
//! certificates and small rationals.

use crate::error::{validation, Error, Result};
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

/// Square nonnegative integer matrix with checked arithmetic; overflow
/// is reported as a resource limit rather than wrapped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub n: usize,
    data: Vec<u128>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            data: alloc::vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u128>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(validation("matrix rows must be square"));
        }
        Ok(IntMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> Vec<Vec<u128>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)]).collect()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(validation("matrix size mismatch"));
        }
        let mut out = IntMatrix::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..self.n {
                    let term = a
                        .checked_mul(other[(k, j)])
                        .ok_or_else(|| Error::ResourceLimit("matrix entry overflow".to_string()))?;
                    out[(i, j)] = out[(i, j)]
                        .checked_add(term)
                        .ok_or_else(|| Error::ResourceLimit("matrix entry overflow".to_string()))?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Result<IntMatrix> {
        let mut acc = IntMatrix::identity(self.n);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn min_entry(&self) -> u128 {
        self.data.iter().copied().min().unwrap_or(0)
    }

    pub fn apply(&self, v: &[u128]) -> Result<Vec<u128>> {
        let mut out = alloc::vec![0u128; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let term = self[(i, j)]
                    .checked_mul(v[j])
                    .ok_or_else(|| Error::ResourceLimit("vector entry overflow".to_string()))?;
                out[i] = out[i]
                    .checked_add(term)
                    .ok_or_else(|| Error::ResourceLimit("vector entry overflow".to_string()))?;
            }
        }
        Ok(out)
    }

    pub fn boolean(&self) -> BoolMatrix {
        let mut b = BoolMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self[(i, j)] > 0 {
                    b.set(i, j, true);
                }
            }
        }
        b
    }

    /// Primitivity via Boolean powers, bounded by the Wielandt exponent.
    pub fn is_primitive(&self) -> bool {
        self.boolean().primitive_exponent().is_some()
    }
}

impl core::ops::Index<(usize, usize)> for IntMatrix {
    type Output = u128;
    fn index(&self, (i, j): (usize, usize)) -> &u128 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u128 {
        &mut self.data[i * self.n + j]
    }
}

/// Boolean square matrix on at most 64 indices, rows as bitmasks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BoolMatrix {
    pub n: usize,
    rows: [u64; 8],
}

impl BoolMatrix {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 8 * 8);
        BoolMatrix { n, rows: [0; 8] }
    }

    pub fn from_bits(n: usize, bits: u64) -> Self {
        // Row-major bit layout for exhaustive enumeration (n*n <= 64).
        let mut m = BoolMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                if bits & (1u64 << (i * n + j)) != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] & (1u64 << j) != 0
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1u64 << j;
        } else {
            self.rows[i] &= !(1u64 << j);
        }
    }

    pub fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let mut out = BoolMatrix::zero(self.n);
        for i in 0..self.n {
            let mut acc = 0u64;
            let mut row = self.rows[i];
            while row != 0 {
                let k = row.trailing_zeros() as usize;
                row &= row - 1;
                acc |= other.rows[k];
            }
            out.rows[i] = acc & mask(self.n);
        }
        out
    }

    pub fn all_positive(&self) -> bool {
        let m = mask(self.n);
        (0..self.n).all(|i| self.rows[i] & m == m)
    }

    /// Least `k` with all entries of the k-th power positive, bounded by
    /// the Wielandt exponent `(n-1)^2 + 1`; `None` for imprimitive
    /// matrices.
    pub fn primitive_exponent(&self) -> Option<usize> {
        let bound = (self.n - 1) * (self.n - 1) + 1;
        let mut p = *self;
        for k in 1..=bound {
            if p.all_positive() {
                return Some(k);
            }
            p = p.mul(self);
        }
        if p.all_positive() {
            return Some(bound + 1);
        }
        None
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Result of the exhaustive Boolean exponent search.
#[derive(Clone, Debug)]
pub struct BoolExponent {
    pub m: usize,
    /// Maximum primitivity exponent over all primitive m-by-m Boolean
    /// matrices.
    pub kappa2: usize,
    /// A matrix attaining it (row bitmasks).
    pub attaining: Vec<u64>,
    /// Derived uniform constant: three times kappa2.
    pub kappa1: usize,
    /// The Wielandt bound `(m-1)^2 + 1` for reference.
    pub wielandt: usize,
}

/// Exhausts all `m x m` Boolean matrices (`m <= 4`) and returns the
/// maximal primitivity exponent with an attaining matrix.
pub fn bool_exponent(m: usize) -> Result<BoolExponent> {
    if m == 0 {
        return Err(validation("matrix size must be positive"));
    }
    if m > 4 {
        return Err(Error::ResourceLimit(
            "Boolean exponent exhaustion supports m <= 4".to_string(),
        ));
    }
    let total: u64 = 1u64 << (m * m);
    let mut best = 0usize;
    let mut attaining = BoolMatrix::zero(m);
    for bits in 0..total {
        let mat = BoolMatrix::from_bits(m, bits);
        if let Some(k) = mat.primitive_exponent() {
            if k > best {
                best = k;
                attaining = mat;
            }
        }
    }
    if best == 0 {
        return Err(Error::PropertyViolation("no primitive matrix found".to_string()));
    }
    Ok(BoolExponent {
        m,
        kappa2: best,
        attaining: attaining.rows[..m].to_vec(),
        kappa1: 3 * best,
        wielandt: (m - 1) * (m - 1) + 1,
    })
}

/// Exact rational with reduced i128 representation.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Result<Rational> {
        if den == 0 {
            return Err(validation("rational with zero denominator"));
        }
        let mut r = Rational { num, den };
        r.reduce();
        Ok(r)
    }

    pub fn from_int(n: i128) -> Rational {
        Rational { num: n, den: 1 }
    }

    fn reduce(&mut self) {
        if self.den < 0 {
            self.num = -self.num;
            self.den = -self.den;
        }
        let g = gcd(self.num.unsigned_abs(), self.den.unsigned_abs()).max(1);
        self.num /= g as i128;
        self.den /= g as i128;
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn mul(&self, other: &Rational) -> Result<Rational> {
        let num = self
            .num
            .checked_mul(other.num)
            .ok_or_else(|| Error::ResourceLimit("rational overflow".to_string()))?;
        let den = self
            .den
            .checked_mul(other.den)
            .ok_or_else(|| Error::ResourceLimit("rational overflow".to_string()))?;
        Rational::new(num, den)
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::new(self.den, self.num)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Interval certificate for the Perron-Frobenius eigenvalue of a
/// primitive matrix: Collatz-Wielandt ratios of an iterated positive
/// integer vector, plus a floating point approximation.
#[derive(Clone, Debug)]
pub struct PfCertificate {
    pub lower: Rational,
    pub upper: Rational,
    pub approx: f64,
}

pub fn pf_certificate(m: &IntMatrix, warmup: usize) -> Result<PfCertificate> {
    if m.n == 0 {
        return Err(validation("empty matrix"));
    }
    let mut v = alloc::vec![1u128; m.n];
    for _ in 0..warmup {
        v = m.apply(&v)?;
        if v.iter().all(|&x| x == 0) {
            return Err(validation("matrix is nilpotent on the positive cone"));
        }
    }
    if v.iter().any(|&x| x == 0) {
        return Err(validation("vector not positive; matrix not primitive enough for the certificate"));
    }
    let w = m.apply(&v)?;
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for i in 0..m.n {
        let r = Rational::new(w[i] as i128, v[i] as i128)?;
        lower = Some(match lower {
            None => r,
            Some(l) => {
                if r < l {
                    r
                } else {
                    l
                }
            }
        });
        upper = Some(match upper {
            None => r,
            Some(u) => {
                if r > u {
                    r
                } else {
                    u
                }
            }
        });
    }
    // Floating approximation by normalized power iteration.
    let mut x: Vec<f64> = alloc::vec![1.0; m.n];
    let mut approx = 1.0f64;
    for _ in 0..200 {
        let mut y = alloc::vec![0.0f64; m.n];
        for i in 0..m.n {
            for j in 0..m.n {
                y[i] += m[(i, j)] as f64 * x[j];
            }
        }
        let norm: f64 = y.iter().map(|a| a * a).sum::<f64>();
        let norm = sqrt(norm);
        if norm == 0.0 {
            break;
        }
        for a in &mut y {
            *a /= norm;
        }
        approx = norm_ratio(m, &y);
        x = y;
    }
    Ok(PfCertificate {
        lower: lower.unwrap(),
        upper: upper.unwrap(),
        approx,
    })
}

fn norm_ratio(m: &IntMatrix, x: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..m.n {
        let mut yi = 0.0;
        for j in 0..m.n {
            yi += m[(i, j)] as f64 * x[j];
        }
        num += yi * x[i];
        den += x[i] * x[i];
    }
    num / den
}

/// Newton square root; `no_std` has no `f64::sqrt`.
fn sqrt(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut r = x;
    for _ in 0..64 {
        r = 0.5 * (r + x / r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wielandt_matrix_attains_the_bound() {
        let b = bool_exponent(3).unwrap();
        assert_eq!(b.kappa2, 5);
        assert_eq!(b.wielandt, 5);
        let b2 = bool_exponent(2).unwrap();
        assert_eq!(b2.kappa2, 2);
        let b1 = bool_exponent(1).unwrap();
        assert_eq!(b1.kappa2, 1);
    }

    #[test]
    fn fibonacci_certificate_brackets_the_golden_ratio() {
        let m = IntMatrix::from_rows(&[alloc::vec![1, 1], alloc::vec![1, 0]]).unwrap();
        let cert = pf_certificate(&m, 12).unwrap();
        let phi = 1.618033988749895;
        assert!(cert.lower.to_f64() <= phi && phi <= cert.upper.to_f64());
        assert!((cert.approx - phi).abs() < 1e-6);
    }
}
