//! Exact characteristic and minimal polynomials of integer matrices, and
//! integer eigenvalue scans.

use super::matrix::IntMatrix;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

/// A polynomial over Z with coefficients in ascending degree order and a
/// nonzero leading coefficient (the zero polynomial is an empty vector).
#[derive(Clone, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last().map_or(false, |c| c.is_one())
    }

    pub fn eval_matrix(&self, a: &IntMatrix) -> IntMatrix {
        let n = a.rows();
        let mut acc = IntMatrix::zero(n, n);
        for c in self.0.iter().rev() {
            acc = &(&acc * a) + &scalar(n, c);
            // Horner step: acc = acc*A + c*I
        }
        acc
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact division by the monic linear factor (x - lambda). Panics if
    /// lambda is not a root.
    pub fn divide_linear(&self, lambda: &BigInt) -> IntPoly {
        assert!(self.eval(lambda).is_zero(), "not a root");
        let n = self.0.len();
        let mut out = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for k in (1..n).rev() {
            carry = &self.0[k] + lambda * &carry;
            out[k - 1] = carry.clone();
        }
        IntPoly(out)
    }

    /// Roots among the integers, found by divisor scan of the constant term
    /// (after stripping powers of x). Returned sorted ascending, with the
    /// multiplicity as root of this polynomial.
    pub fn integer_roots(&self) -> Vec<(BigInt, usize)> {
        let mut p = self.clone();
        let mut roots: Vec<(BigInt, usize)> = Vec::new();
        // strip x^k
        let mut zero_mult = 0usize;
        while p.0.len() > 1 && p.0[0].is_zero() {
            p.0.remove(0);
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((BigInt::zero(), zero_mult));
        }
        if p.0.len() <= 1 {
            return roots;
        }
        let constant = p.0[0].clone();
        let mut candidates: Vec<BigInt> = Vec::new();
        let c = constant.abs();
        let mut d = BigInt::one();
        while &d * &d <= c {
            if c.is_multiple_of(&d) {
                candidates.push(d.clone());
                candidates.push(&c / &d);
            }
            d += 1;
        }
        let mut signed: Vec<BigInt> = candidates
            .iter()
            .flat_map(|d| [d.clone(), -d.clone()])
            .collect();
        signed.sort();
        signed.dedup();
        for cand in signed {
            let mut mult = 0usize;
            while p.0.len() > 1 && p.eval(&cand).is_zero() {
                p = p.divide_linear(&cand);
                mult += 1;
            }
            if mult > 0 {
                roots.push((cand, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        roots
    }
}

impl std::fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn scalar(n: usize, c: &BigInt) -> IntMatrix {
    IntMatrix::from_fn(n, n, |i, j| if i == j { c.clone() } else { BigInt::zero() })
}

/// Characteristic polynomial det(xI - A) by the Faddeev-LeVerrier recursion;
/// all divisions are exact over the integers.
pub fn char_poly(a: &IntMatrix) -> IntPoly {
    assert!(a.is_square());
    let n = a.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zero(n, n);
    let mut c = BigInt::one();
    for k in 1..=n {
        m = &(a * &m) + &scalar(n, &c);
        let am = a * &m;
        let trace: BigInt = (0..n).map(|i| am[(i, i)].clone()).sum();
        let (q, r) = trace.div_rem(&BigInt::from(k as i64));
        debug_assert!(r.is_zero());
        c = -q;
        coeffs[n - k] = c.clone();
    }
    IntPoly(coeffs)
}

/// Minimal polynomial: monic integer polynomial of least degree with
/// p(A) = 0. Computed as the least common multiple of the annihilators of
/// the standard basis vectors (exact rational elimination), then verified
/// by p(A) = 0 and p | char_poly over Z.
pub fn min_poly(a: &IntMatrix) -> IntPoly {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return IntPoly(vec![BigInt::one()]);
    }
    let mut lcm = RatPoly(vec![BigRational::one()]);
    for start in 0..n {
        let ann = vector_annihilator(a, start);
        lcm = rat_lcm(&lcm, &ann);
        if lcm.0.len() == n + 1 {
            break;
        }
    }
    let p = lcm
        .to_integer()
        .expect("minimal polynomial of an integer matrix must be integral");
    assert!(p.is_monic());
    assert!(p.eval_matrix(a).is_zero(), "min poly does not annihilate");
    p
}

/// Result of the full spectral scan of a square integer matrix.
#[derive(Clone, Debug)]
pub struct SpectralScan {
    pub char_poly: IntPoly,
    pub min_poly: IntPoly,
    /// Integer eigenvalues with multiplicity as roots of the characteristic
    /// polynomial, sorted ascending.
    pub integer_eigenvalues: Vec<(BigInt, usize)>,
}

pub fn spectral_scan(a: &IntMatrix) -> SpectralScan {
    let cp = char_poly(a);
    let mp = min_poly(a);
    let integer_eigenvalues = cp.integer_roots();
    SpectralScan {
        char_poly: cp,
        min_poly: mp,
        integer_eigenvalues,
    }
}

// Monic rational polynomials, ascending coefficients.
#[derive(Clone, PartialEq, Eq)]
struct RatPoly(Vec<BigRational>);

impl RatPoly {
    fn to_integer(&self) -> Option<IntPoly> {
        if self.0.iter().all(|c| c.is_integer()) {
            Some(IntPoly(self.0.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }
}

/// Monic annihilator of the Krylov sequence e_i, A e_i, A^2 e_i, ...
fn vector_annihilator(a: &IntMatrix, start: usize) -> RatPoly {
    let n = a.rows();
    // Build Krylov vectors until a dependency appears. Gaussian elimination
    // over Q with full bookkeeping of the combination coefficients.
    let mut basis: Vec<Vec<BigRational>> = Vec::new(); // reduced rows
    let mut combos: Vec<Vec<BigRational>> = Vec::new(); // expression in Krylov terms
    let mut v: Vec<BigInt> = (0..n)
        .map(|i| if i == start { BigInt::one() } else { BigInt::zero() })
        .collect();
    for step in 0..=n {
        let mut row: Vec<BigRational> = v
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let mut combo = vec![BigRational::zero(); step + 1];
        combo[step] = BigRational::one();
        // reduce against existing basis
        for (b, c) in basis.iter().zip(combos.iter()) {
            let lead = b.iter().position(|x| !x.is_zero()).unwrap();
            if row[lead].is_zero() {
                continue;
            }
            let factor = &row[lead] / &b[lead];
            for k in 0..n {
                let t = &factor * &b[k];
                row[k] -= t;
            }
            for (k, ck) in c.iter().enumerate() {
                let t = &factor * ck;
                if k < combo.len() {
                    combo[k] -= t;
                } else {
                    combo.push(-t);
                }
            }
        }
        if row.iter().all(|x| x.is_zero()) {
            // combo expresses 0 = sum combo[k] A^k e_start with combo[step]=1
            return RatPoly(combo);
        }
        basis.push(row);
        combos.push(combo);
        // v = A v
        let mut next = vec![BigInt::zero(); n];
        for i in 0..n {
            for (j, item) in v.iter().enumerate() {
                if !a[(i, j)].is_zero() && !item.is_zero() {
                    next[i] += &a[(i, j)] * item;
                }
            }
        }
        v = next;
    }
    unreachable!("Krylov sequence of length n+1 must be dependent");
}

fn rat_divmod(num: &RatPoly, den: &RatPoly) -> (RatPoly, RatPoly) {
    let mut rem = num.0.clone();
    let dn = den.0.len();
    assert!(dn > 0);
    if rem.len() < dn {
        return (RatPoly(vec![]), RatPoly(rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dn + 1];
    for k in (0..quot.len()).rev() {
        let coeff = &rem[k + dn - 1] / &den.0[dn - 1];
        quot[k] = coeff.clone();
        for i in 0..dn {
            let t = &coeff * &den.0[i];
            rem[k + i] -= t;
        }
    }
    while rem.last().map_or(false, |c| c.is_zero()) {
        rem.pop();
    }
    (RatPoly(quot), RatPoly(rem))
}

fn rat_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.0.is_empty() {
        let (_, r) = rat_divmod(&x, &y);
        x = y;
        y = r;
    }
    // normalize monic
    if let Some(lead) = x.0.last().cloned() {
        if !lead.is_zero() {
            for c in x.0.iter_mut() {
                *c = &*c / &lead;
            }
        }
    }
    x
}

fn rat_lcm(a: &RatPoly, b: &RatPoly) -> RatPoly {
    if a.0.len() <= 1 {
        return b.clone();
    }
    if b.0.len() <= 1 {
        return a.clone();
    }
    let g = rat_gcd(a, b);
    let (q, r) = rat_divmod(a, &g);
    debug_assert!(r.0.is_empty());
    // lcm = (a/g) * b
    let mut out = vec![BigRational::zero(); q.0.len() + b.0.len() - 1];
    for (i, qi) in q.0.iter().enumerate() {
        for (j, bj) in b.0.iter().enumerate() {
            let t = qi * bj;
            out[i + j] += t;
        }
    }
    RatPoly(out)
}

/// Exact polynomial division over Z for monic divisors; None if not exact.
pub fn int_poly_div_exact(num: &IntPoly, den: &IntPoly) -> Option<IntPoly> {
    assert!(den.is_monic());
    let nn = num.0.len();
    let dn = den.0.len();
    if nn < dn {
        return None;
    }
    let mut rem = num.0.clone();
    let mut quot = vec![BigInt::zero(); nn - dn + 1];
    for k in (0..quot.len()).rev() {
        let coeff = rem[k + dn - 1].clone();
        quot[k] = coeff.clone();
        for i in 0..dn {
            let t = &coeff * &den.0[i];
            rem[k + i] -= t;
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(IntPoly(quot))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn identity_3x3() {
        let a = IntMatrix::identity(3);
        let scan = spectral_scan(&a);
        // min poly x - 1, eigenvalue 1 with char multiplicity 3
        assert_eq!(scan.min_poly.0, vec![BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(
            scan.integer_eigenvalues,
            vec![(BigInt::from(1), 3)]
        );
    }

    #[test]
    fn morse_reduced() {
        // char poly x^2 - x - 2 = (x+1)(x-2)
        let a = m(&[vec![1, 1], vec![2, 0]]);
        let scan = spectral_scan(&a);
        assert_eq!(
            scan.char_poly.0,
            vec![BigInt::from(-2), BigInt::from(-1), BigInt::from(1)]
        );
        assert_eq!(scan.min_poly, scan.char_poly);
        assert_eq!(
            scan.integer_eigenvalues,
            vec![(BigInt::from(-1), 1), (BigInt::from(2), 1)]
        );
    }

    #[test]
    fn pathologic_residual_has_no_integer_roots() {
        // char poly x^2 - 9x + 17; eigenvalues (9 +- sqrt(13))/2
        let a = m(&[vec![3, 1], vec![1, 6]]);
        let scan = spectral_scan(&a);
        assert_eq!(
            scan.char_poly.0,
            vec![BigInt::from(17), BigInt::from(-9), BigInt::from(1)]
        );
        assert!(scan.integer_eigenvalues.is_empty());
    }

    #[test]
    fn min_poly_smaller_than_char() {
        // diag(2,2): char (x-2)^2, min (x-2)
        let a = m(&[vec![2, 0], vec![0, 2]]);
        let scan = spectral_scan(&a);
        assert_eq!(scan.min_poly.0, vec![BigInt::from(-2), BigInt::from(1)]);
        assert_eq!(scan.char_poly.degree(), 2);
        // Chair 3x3 satisfies (x-2)(x-4) even though char has degree 3
        let c = m(&[vec![2, -1, 1], vec![0, 5, -3], vec![0, 1, 1]]);
        let scan = spectral_scan(&c);
        assert_eq!(
            scan.min_poly.0,
            vec![BigInt::from(8), BigInt::from(-6), BigInt::from(1)]
        );
    }

    #[test]
    fn divide_linear_exact() {
        // (x+1)(x-2) = x^2 - x - 2
        let p = IntPoly(vec![BigInt::from(-2), BigInt::from(-1), BigInt::from(1)]);
        let q = p.divide_linear(&BigInt::from(-1));
        assert_eq!(q.0, vec![BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn char_poly_of_empty_matrix() {
        let a = IntMatrix::zero(0, 0);
        assert_eq!(char_poly(&a).0, vec![BigInt::from(1)]);
    }
}
