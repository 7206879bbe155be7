//! Canonical expressions for abelian groups arising as direct limits, and
//! the reduction engine that evaluates `lim(A, G)` into closed form where
//! possible.
//!
//! The canonical form of an expression is: free part, torsion factors in a
//! divisibility chain, localizations `Z[1/m]` with squarefree radicals in
//! ascending order, then residual limit terms in matrix-lexicographic order.
//! A residual term is a direct limit the engine declines to decompose; it is
//! known to be a full-rank subgroup of `Z[1/det]^n` and nothing more is
//! claimed about it.

use crate::exactmat::{
    check_well_defined, image_embedding, induced_map, kernel_embedding, min_poly, snf,
    IntMatrix, PresentError, PresentedGroup,
};
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbGroupError {
    SingularMatrix,
    NotSquare,
    NotAnEigenvalue(BigInt),
    UnresolvedOperand(&'static str),
    CharPolyMismatch,
    DimensionMismatch,
    DoesNotDescend(String),
}

impl fmt::Display for AbGroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbGroupError::SingularMatrix => write!(f, "matrix is singular"),
            AbGroupError::NotSquare => write!(f, "matrix is not square"),
            AbGroupError::NotAnEigenvalue(l) => {
                write!(f, "{l} is not a root of the minimal polynomial")
            }
            AbGroupError::UnresolvedOperand(op) => {
                write!(f, "cannot {op} unresolved expression")
            }
            AbGroupError::CharPolyMismatch => {
                write!(f, "characteristic polynomials differ")
            }
            AbGroupError::DimensionMismatch => write!(f, "dimension mismatch"),
            AbGroupError::DoesNotDescend(why) => write!(f, "{why}"),
        }
    }
}

impl std::error::Error for AbGroupError {}

impl From<PresentError> for AbGroupError {
    fn from(e: PresentError) -> Self {
        AbGroupError::DoesNotDescend(e.to_string())
    }
}

/// A residual direct-limit term `lim(A, Z^n)`: full rank, |det| > 1, no
/// integer eigenvalues of modulus <= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualTerm {
    pub matrix: IntMatrix,
    pub det: BigInt,
}

impl ResidualTerm {
    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    /// Containment note: the term is a rank-n subgroup of Z[1/rad(det)]^n.
    pub fn containment_note(&self) -> String {
        format!(
            "rank-{} subgroup of Z[1/{}]^{}",
            self.rank(),
            radical(&self.det.abs()),
            self.rank()
        )
    }
}

/// Canonical description of an abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupExpression {
    pub free_rank: usize,
    /// Invariant factors > 1, each dividing the next.
    pub torsion: Vec<BigInt>,
    /// (squarefree radical >= 2, exponent) meaning Z[1/m]^exponent.
    pub localized: Vec<(BigInt, usize)>,
    pub residual: Vec<ResidualTerm>,
    /// A group known only as an extension of `quotient` by `sub`. When set,
    /// the top-level summand lists above are empty.
    pub extension: Option<Box<(GroupExpression, GroupExpression)>>,
}

impl GroupExpression {
    pub fn zero() -> Self {
        GroupExpression {
            free_rank: 0,
            torsion: vec![],
            localized: vec![],
            residual: vec![],
            extension: None,
        }
    }

    pub fn free(rank: usize) -> Self {
        GroupExpression {
            free_rank: rank,
            ..Self::zero()
        }
    }

    pub fn torsion_group(factors: Vec<BigInt>) -> Self {
        let mut g = Self::zero();
        g.torsion = canonical_invariant_factors(factors);
        g
    }

    pub fn localization(m: &BigInt, exponent: usize) -> Self {
        let rad = radical(&m.abs());
        assert!(rad > BigInt::one(), "localization radical must exceed 1");
        let mut g = Self::zero();
        if exponent > 0 {
            g.localized.push((rad, exponent));
        }
        g
    }

    pub fn residual_term(matrix: IntMatrix) -> Self {
        let det = matrix.det();
        assert!(det.abs() > BigInt::one());
        let mut g = Self::zero();
        g.residual.push(ResidualTerm { matrix, det });
        g
    }

    pub fn extension_of(sub: GroupExpression, quotient: GroupExpression) -> Self {
        GroupExpression {
            free_rank: 0,
            torsion: vec![],
            localized: vec![],
            residual: vec![],
            extension: Some(Box::new((sub, quotient))),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0
            && self.torsion.is_empty()
            && self.localized.is_empty()
            && self.residual.is_empty()
            && self.extension.is_none()
    }

    pub fn is_torsion_free(&self) -> bool {
        match &self.extension {
            Some(parts) => parts.0.is_torsion_free() && parts.1.is_torsion_free(),
            None => self.torsion.is_empty(),
        }
    }

    /// Free of residual terms and extension records.
    pub fn is_resolved(&self) -> bool {
        self.residual.is_empty() && self.extension.is_none()
    }

    /// Resolved and torsion-free and without localizations: plain Z^n.
    pub fn is_free_abelian(&self) -> bool {
        self.is_resolved() && self.torsion.is_empty() && self.localized.is_empty()
    }

    /// Torsionfree rank (torsion contributes 0; extensions add up).
    pub fn rank(&self) -> usize {
        match &self.extension {
            Some(parts) => parts.0.rank() + parts.1.rank(),
            None => {
                self.free_rank
                    + self.localized.iter().map(|(_, e)| e).sum::<usize>()
                    + self.residual.iter().map(|r| r.rank()).sum::<usize>()
            }
        }
    }

    pub fn direct_sum(&self, other: &GroupExpression) -> GroupExpression {
        assert!(
            self.extension.is_none() && other.extension.is_none(),
            "direct sums of extension records are not formed"
        );
        let mut g = GroupExpression {
            free_rank: self.free_rank + other.free_rank,
            torsion: self
                .torsion
                .iter()
                .chain(other.torsion.iter())
                .cloned()
                .collect(),
            localized: self
                .localized
                .iter()
                .chain(other.localized.iter())
                .cloned()
                .collect(),
            residual: self
                .residual
                .iter()
                .chain(other.residual.iter())
                .cloned()
                .collect(),
            extension: None,
        };
        g.canonicalize();
        g
    }

    fn canonicalize(&mut self) {
        self.torsion = canonical_invariant_factors(std::mem::take(&mut self.torsion));
        let mut merged: Vec<(BigInt, usize)> = Vec::new();
        let mut locs = std::mem::take(&mut self.localized);
        locs.sort_by(|a, b| a.0.cmp(&b.0));
        for (rad, e) in locs {
            if e == 0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == rad => last.1 += e,
                _ => merged.push((rad, e)),
            }
        }
        self.localized = merged;
        self.residual.sort_by(|a, b| a.matrix.lex_cmp(&b.matrix));
    }

    /// Canonical string, e.g. `Z^2 + Z/2 + Z[1/2]^3 + lim[[3,1],[1,6]]`.
    /// String equality on canonical strings is the library's group-expression
    /// equality.
    pub fn canonical(&self) -> String {
        if let Some(parts) = &self.extension {
            return format!("ext({}; {})", parts.0.canonical(), parts.1.canonical());
        }
        let mut terms: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => terms.push("Z".into()),
            k => terms.push(format!("Z^{k}")),
        }
        for t in &self.torsion {
            terms.push(format!("Z/{t}"));
        }
        for (rad, e) in &self.localized {
            if *e == 1 {
                terms.push(format!("Z[1/{rad}]"));
            } else {
                terms.push(format!("Z[1/{rad}]^{e}"));
            }
        }
        for r in &self.residual {
            terms.push(format!("lim{}", r.matrix.bracket_string()));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Like `canonical`, with a containment note after each residual term.
    pub fn describe(&self) -> String {
        if let Some(parts) = &self.extension {
            return format!("ext({}; {})", parts.0.describe(), parts.1.describe());
        }
        if self.residual.is_empty() {
            return self.canonical();
        }
        let mut s = self.canonical();
        for r in &self.residual {
            s.push_str(&format!(" ({})", r.containment_note()));
        }
        s
    }
}

impl fmt::Display for GroupExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

/// Product of the distinct prime divisors of |m|; radical(1) = 1.
pub fn radical(m: &BigInt) -> BigInt {
    let mut m = m.abs();
    assert!(!m.is_zero(), "radical of zero");
    let mut rad = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if m.is_multiple_of(&p) {
            rad *= &p;
            while m.is_multiple_of(&p) {
                m /= &p;
            }
        }
        p += 1;
    }
    if m > BigInt::one() {
        rad *= &m;
    }
    rad
}

fn factorize(m: &BigInt) -> Vec<(BigInt, u32)> {
    let mut m = m.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if m.is_multiple_of(&p) {
            let mut e = 0;
            while m.is_multiple_of(&p) {
                m /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

/// Rewrites a multiset of cyclic orders (> 1) as an invariant-factor chain
/// d_1 | d_2 | ... in ascending order.
pub fn canonical_invariant_factors(factors: Vec<BigInt>) -> Vec<BigInt> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<BigInt, Vec<u32>> = BTreeMap::new();
    for f in factors {
        let f = f.abs();
        if f <= BigInt::one() {
            continue;
        }
        for (p, e) in factorize(&f) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let levels = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut chain = vec![BigInt::one(); levels];
    for (p, mut exps) in by_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        // largest prime power goes into the last invariant factor
        for (slot, e) in exps.into_iter().enumerate() {
            let idx = levels - 1 - slot;
            chain[idx] *= p.pow(e);
        }
    }
    chain.retain(|d| *d > BigInt::one());
    chain
}

/// One step of the reduction log kept by the limit engine.
pub type Trace = Vec<String>;

#[derive(Clone, Copy, Debug)]
pub struct LimitOptions {
    /// Power bound for localization certificates.
    pub kmax: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        // every bundled example certifies by k <= 8; 64 guards the bound
        LimitOptions { kmax: 64 }
    }
}

/// Evaluates `lim(Z^n -> Z^n -> ...)` along `a` with default options.
pub fn limit_free(a: &IntMatrix) -> GroupExpression {
    limit_free_traced(a, LimitOptions::default()).0
}

/// As `limit_free`, also returning the reduction trace.
pub fn limit_free_traced(a: &IntMatrix, opts: LimitOptions) -> (GroupExpression, Trace) {
    assert!(a.is_square(), "limit of a non-square matrix");
    let mut trace = Trace::new();
    let expr = eval_limit(a.clone(), opts, &mut trace, 2);
    (expr, trace)
}

fn eval_limit(a: IntMatrix, opts: LimitOptions, trace: &mut Trace, squarings: u8) -> GroupExpression {
    let mut a = a;
    let mut free_acc = 0usize;

    loop {
        let n = a.rows();
        if n == 0 {
            break;
        }
        let det = a.det();
        if det.abs().is_one() {
            // Z-invertible: the limit is free of full rank.
            trace.push(format!("det {det} is a unit: lim = Z^{n}"));
            free_acc += n;
            a = IntMatrix::zero(0, 0);
            break;
        }
        if det.is_zero() {
            // strip zero eigenvalues: lim(A, Z^n) = lim(A|_Im A, Im A)
            let img = image_embedding(&a);
            let restricted = induced_map(&a, &img, &img)
                .expect("endomorphism must restrict to its own image lattice");
            trace.push(format!(
                "zero eigenvalues stripped: restricted from rank {n} to rank {}",
                img.free_rank
            ));
            a = restricted;
            continue;
        }
        // extract eigenvalues +1 / -1; the quotient is free so the extension
        // splits and contributes a free summand
        let mp = min_poly(&a);
        let lambda = [BigInt::one(), -BigInt::one()]
            .into_iter()
            .find(|l| mp.eval(l).is_zero());
        if let Some(lambda) = lambda {
            let (restricted, extracted) =
                extract_eigenvalue(&a, &lambda).expect("root of the minimal polynomial");
            trace.push(format!(
                "extracted eigenvalue {lambda}: free summand Z^{extracted}"
            ));
            free_acc += extracted;
            a = restricted;
            continue;
        }
        break;
    }

    let mut expr = GroupExpression::free(free_acc);
    if a.rows() > 0 {
        expr = expr.direct_sum(&resolve_nonsingular(a, opts, trace, squarings));
    }
    expr
}

/// Resolution of a full-rank matrix with no integer eigenvalues of modulus
/// <= 1: block splitting, localization certificates, eigenlattice
/// conjugation, squaring; the fallback is a residual term.
fn resolve_nonsingular(
    a: IntMatrix,
    opts: LimitOptions,
    trace: &mut Trace,
    squarings: u8,
) -> GroupExpression {
    let n = a.rows();

    // literal block-diagonal structure splits as a direct sum of limits
    let comps = components(&a);
    if comps.len() > 1 {
        trace.push(format!(
            "block-diagonal split into sizes {:?}",
            comps.iter().map(|c| c.len()).collect::<Vec<_>>()
        ));
        let mut acc = GroupExpression::zero();
        for c in comps {
            let block = a.submatrix(&c, &c);
            acc = acc.direct_sum(&eval_limit(block, opts, trace, squarings));
        }
        return acc;
    }

    // localization certificate: A^k = 0 mod |det| proves lim = Z[1/rad]^n
    let det = a.det().abs();
    if let Ok(Some(rad)) = certify_localization(&a, opts.kmax) {
        if rad.is_one() {
            trace.push(format!("certified trivial radical: lim = Z^{n}"));
            return GroupExpression::free(n);
        }
        trace.push(format!(
            "certified localization: some A^k = 0 mod {det}, lim = Z[1/{rad}]^{n}"
        ));
        return GroupExpression::localization(&rad, n);
    }

    // conjugation by a basis assembled from integer-eigenvalue sublattices
    if let Some((g, blocks)) = eigenlattice_split(&a) {
        trace.push(format!(
            "unimodular conjugation by {} splits the matrix",
            g.bracket_string()
        ));
        let mut acc = GroupExpression::zero();
        for b in blocks {
            acc = acc.direct_sum(&eval_limit(b, opts, trace, squarings));
        }
        return acc;
    }

    // lim(A) = lim(A^2): squaring can reveal block structure
    if squarings > 0 {
        let a2 = &a * &a;
        if components(&a2).len() > 1 || eigenlattice_split(&a2).is_some() {
            trace.push("passed to the squared matrix".into());
            return eval_limit(a2, opts, trace, squarings - 1);
        }
    }

    // bounded single elementary conjugations
    if n <= 6 {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for c in -8i64..=8 {
                    if c == 0 {
                        continue;
                    }
                    let mut e = IntMatrix::identity(n);
                    e[(i, j)] = BigInt::from(c);
                    let mut e_inv = IntMatrix::identity(n);
                    e_inv[(i, j)] = BigInt::from(-c);
                    let conj = &(&e * &a) * &e_inv;
                    if components(&conj).len() > 1 {
                        trace.push(format!(
                            "elementary conjugation by {} splits the matrix",
                            e.bracket_string()
                        ));
                        return eval_limit(conj, opts, trace, squarings);
                    }
                }
            }
        }
    }

    let term = ResidualTerm {
        det: a.det(),
        matrix: a,
    };
    trace.push(format!(
        "no certificate within k <= {}: residual term ({})",
        opts.kmax,
        term.containment_note()
    ));
    let mut g = GroupExpression::zero();
    g.residual.push(term);
    g
}

/// Connected components of the symmetric nonzero pattern; each is sorted.
fn components(a: &IntMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && (!a[(i, j)].is_zero() || !a[(j, i)].is_zero()) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Tries to assemble a unimodular basis from ker((A - lambda)^e) and the
/// kernel of the complementary minimal-polynomial factor; on success returns
/// the conjugator and the diagonal blocks of G A G^{-1}.
fn eigenlattice_split(a: &IntMatrix) -> Option<(IntMatrix, Vec<IntMatrix>)> {
    let n = a.rows();
    let mp = min_poly(a);
    let roots = mp.integer_roots();
    for (lambda, mult) in &roots {
        // f = (x - lambda)^mult, g = mp / f
        let mut f = crate::exactmat::IntPoly(vec![BigInt::one()]);
        let linear = crate::exactmat::IntPoly(vec![-lambda.clone(), BigInt::one()]);
        for _ in 0..*mult {
            f = poly_mul(&f, &linear);
        }
        let Some(g) = crate::exactmat::int_poly_div_exact(&mp, &f) else {
            continue;
        };
        if g.degree() == 0 {
            continue;
        }
        let v1 = kernel_embedding(&f.eval_matrix(a));
        let v2 = kernel_embedding(&g.eval_matrix(a));
        if v1.free_rank == 0 || v2.free_rank == 0 || v1.free_rank + v2.free_rank != n {
            continue;
        }
        let basis = v1.from_reduced.hstack(&v2.from_reduced);
        if !basis.is_unimodular() {
            continue;
        }
        let conj = &(&basis.unimodular_inverse() * a) * &basis;
        // verify the conjugate is block diagonal along the assembled split
        let k = v1.free_rank;
        let mut ok = true;
        for (i, j, x) in conj.entries_indexed() {
            if ((i < k) != (j < k)) && !x.is_zero() {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let idx1: Vec<usize> = (0..k).collect();
        let idx2: Vec<usize> = (k..n).collect();
        let b1 = conj.submatrix(&idx1, &idx1);
        let b2 = conj.submatrix(&idx2, &idx2);
        return Some((basis, vec![b1, b2]));
    }
    None
}

fn poly_mul(a: &crate::exactmat::IntPoly, b: &crate::exactmat::IntPoly) -> crate::exactmat::IntPoly {
    let mut out = vec![BigInt::zero(); a.0.len() + b.0.len() - 1];
    for (i, ai) in a.0.iter().enumerate() {
        for (j, bj) in b.0.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    crate::exactmat::IntPoly(out)
}

/// Certifies `lim(A, Z^n) = Z[1/rad(|det A|)]^n` by finding a power with
/// A^k = 0 mod |det A|, k <= kmax. Then A^{jk} = 0 mod det^j by induction,
/// so the union of A^{-i} Z^n saturates Z[1/det]^n; the reverse inclusion
/// always holds. Absence of a certificate proves nothing.
pub fn certify_localization(a: &IntMatrix, kmax: usize) -> Result<Option<BigInt>, AbGroupError> {
    if !a.is_square() {
        return Err(AbGroupError::NotSquare);
    }
    let det = a.det().abs();
    if det.is_zero() {
        return Err(AbGroupError::SingularMatrix);
    }
    if det.is_one() {
        return Ok(Some(BigInt::one()));
    }
    let mut power = a.mod_reduce(&det);
    for _k in 1..=kmax {
        if power.is_zero() {
            return Ok(Some(radical(&det)));
        }
        power = (&power * a).mod_reduce(&det);
    }
    Ok(None)
}

/// Extracts the eigenvalue lambda in {1, -1}: returns the matrix induced on
/// the lattice ker q(A) (where minpoly = (x - lambda) q) and the rank of
/// q(A) Z^n. The quotient system lim(lambda I, q(A) Z^n) is free of that
/// rank, so the callers add it as a free summand; the sequence splits
/// because the quotient is free.
pub fn extract_eigenvalue(
    a: &IntMatrix,
    lambda: &BigInt,
) -> Result<(IntMatrix, usize), AbGroupError> {
    if !a.is_square() {
        return Err(AbGroupError::NotSquare);
    }
    let mp = min_poly(a);
    if !mp.eval(lambda).is_zero() {
        return Err(AbGroupError::NotAnEigenvalue(lambda.clone()));
    }
    let q = mp.divide_linear(lambda);
    let qa = q.eval_matrix(a);
    let ker = kernel_embedding(&qa);
    let restricted =
        induced_map(a, &ker, &ker).map_err(|e| AbGroupError::DoesNotDescend(e.to_string()))?;
    let extracted_rank = a.rows() - ker.free_rank;
    Ok((restricted, extracted_rank))
}

/// Evaluates `lim(m, G)` for a presented group G = torsion + free, where m
/// is given on reduced coordinates (torsion first). The torsion part limits
/// to its eventual image T_inf; the free part goes through `limit_free`.
/// The connecting extension is declared split when a torsion lift tau with
/// tau . D = A . tau + B (modulo the torsion factors) exists for the system
/// or one of its iterates; otherwise an extension record is emitted.
pub fn limit_presented(
    m: &IntMatrix,
    g: &PresentedGroup,
) -> Result<GroupExpression, AbGroupError> {
    limit_presented_traced(m, g, LimitOptions::default()).map(|(e, _)| e)
}

pub fn limit_presented_traced(
    m: &IntMatrix,
    g: &PresentedGroup,
    opts: LimitOptions,
) -> Result<(GroupExpression, Trace), AbGroupError> {
    check_well_defined(m, g, g).map_err(|e| AbGroupError::DoesNotDescend(e.to_string()))?;
    let k = g.torsion_factors.len();
    let f = g.free_rank;
    let mut trace = Trace::new();

    let free_block = m.submatrix(&idx(k, k + f), &idx(k, k + f));
    if k == 0 {
        let (expr, mut t) = limit_free_traced(&free_block, opts);
        trace.append(&mut t);
        return Ok((expr, trace));
    }

    let torsion_block = m.submatrix(&idx(0, k), &idx(0, k));
    let mixing_block = m.submatrix(&idx(0, k), &idx(k, k + f));
    let moduli = g.torsion_factors.clone();

    let (t_inf, stab) = eventual_torsion_image(&torsion_block, &moduli);
    trace.push(format!(
        "torsion eventual image after {stab} steps: {}",
        GroupExpression::torsion_group(t_inf.clone()).canonical()
    ));

    let (free_expr, mut t) = limit_free_traced(&free_block, opts);
    trace.append(&mut t);

    if t_inf.is_empty() {
        trace.push("torsion dies in the limit".into());
        return Ok((free_expr, trace));
    }

    let torsion_expr = GroupExpression::torsion_group(t_inf);
    let bound = (stab + 4).min(16);
    for step in 1..=bound {
        let ak = torsion_block.pow(step as u64);
        let dk = free_block.pow(step as u64);
        let bk = iterated_mixing(&torsion_block, &mixing_block, &free_block, step);
        if splitting_lift_exists(&ak, &bk, &dk, &moduli) {
            trace.push(format!(
                "splitting lift found for the {step}-fold iterated system"
            ));
            return Ok((torsion_expr.direct_sum(&free_expr), trace));
        }
    }
    trace.push("no splitting lift found: extension recorded".into());
    Ok((GroupExpression::extension_of(torsion_expr, free_expr), trace))
}

fn idx(from: usize, to: usize) -> Vec<usize> {
    (from..to).collect()
}

/// Invariant factors of the eventual image of the torsion endomorphism:
/// Im(A^s) inside (+) Z/d_i stabilizes after at most |T| steps; returns the
/// stabilization step as well.
fn eventual_torsion_image(a: &IntMatrix, moduli: &[BigInt]) -> (Vec<BigInt>, usize) {
    let k = moduli.len();
    let d0 = IntMatrix::from_fn(k, k, |i, j| {
        if i == j {
            moduli[i].clone()
        } else {
            BigInt::zero()
        }
    });
    let image_factors = |power: &IntMatrix| -> Vec<BigInt> {
        // T_s = (A^s Z^k + D0 Z^k) / D0 Z^k, presented via a basis of the
        // numerator lattice
        let stacked = power.hstack(&d0);
        let img = image_embedding(&stacked);
        let basis = img.from_reduced; // k x k, full rank
        let rel = basis
            .to_rational()
            .inverse()
            .expect("numerator lattice has full rank")
            .mul_int(&d0)
            .to_integer()
            .expect("relation lattice is contained in the numerator lattice");
        snf(&rel).torsion_factors()
    };
    let mut power = a.mod_entries(moduli);
    let mut prev = image_factors(&power);
    let mut step = 1usize;
    let order: BigInt = moduli.iter().product();
    let cap = usize::try_from(&order).unwrap_or(usize::MAX).min(64);
    while step < cap.max(1) {
        let next_power = (&power * a).mod_entries(moduli);
        let next = image_factors(&next_power);
        if next == prev {
            break;
        }
        power = next_power;
        prev = next;
        step += 1;
    }
    (canonical_invariant_factors(prev), step)
}

impl IntMatrix {
    /// Row-wise residues modulo the given moduli (one per row).
    fn mod_entries(&self, moduli: &[BigInt]) -> IntMatrix {
        IntMatrix::from_fn(self.rows(), self.cols(), |i, j| {
            let m = &moduli[i];
            ((&self[(i, j)] % m) + m) % m
        })
    }
}

/// B_step for the iterated upper-triangular system [[A,B],[0,D]]^step.
fn iterated_mixing(a: &IntMatrix, b: &IntMatrix, d: &IntMatrix, step: usize) -> IntMatrix {
    let mut acc = IntMatrix::zero(b.rows(), b.cols());
    for j in 0..step {
        let term = &(&a.pow(j as u64) * b) * &d.pow((step - 1 - j) as u64);
        acc = &acc + &term;
    }
    acc
}

/// Decides solvability of tau . D - A . tau = B with row i taken modulo
/// moduli[i], as an integer linear system with modulus slack variables.
fn splitting_lift_exists(a: &IntMatrix, b: &IntMatrix, d: &IntMatrix, moduli: &[BigInt]) -> bool {
    let k = a.rows();
    let f = d.rows();
    if f == 0 {
        return true;
    }
    let unknowns = k * f + k * f; // tau entries + slack entries
    let equations = k * f;
    let mut sys = IntMatrix::zero(equations, unknowns);
    let mut rhs = IntMatrix::zero(equations, 1);
    for i in 0..k {
        for j in 0..f {
            let eq = i * f + j;
            // sum_l tau[i][l] D[l][j] - sum_l A[i][l] tau[l][j] + d_i s = B[i][j]
            for l in 0..f {
                sys[(eq, i * f + l)] += d[(l, j)].clone();
            }
            for l in 0..k {
                sys[(eq, l * f + j)] -= a[(i, l)].clone();
            }
            sys[(eq, k * f + i * f + j)] = moduli[i].clone();
            rhs[(eq, 0)] = b[(i, j)].clone();
        }
    }
    integer_solve_exists(&sys, &rhs)
}

/// Whether M x = v has an integer solution, decided via the Smith form.
fn integer_solve_exists(m: &IntMatrix, v: &IntMatrix) -> bool {
    let s = snf(m);
    let pv = &s.p * v;
    let r = s.rank();
    for i in 0..m.rows() {
        if i < r {
            if !pv[(i, 0)].is_multiple_of(&s.invariant_factors[i]) {
                return false;
            }
        } else if !pv[(i, 0)].is_zero() {
            return false;
        }
    }
    true
}

/// Tensor product over Z of two fully resolved expressions.
pub fn tensor(g1: &GroupExpression, g2: &GroupExpression) -> Result<GroupExpression, AbGroupError> {
    if !g1.is_resolved() || !g2.is_resolved() {
        return Err(AbGroupError::UnresolvedOperand("tensor"));
    }
    let mut out = GroupExpression::zero();
    out.free_rank = g1.free_rank * g2.free_rank;

    // Z^a tensor T
    for t in &g2.torsion {
        for _ in 0..g1.free_rank {
            out.torsion.push(t.clone());
        }
    }
    for t in &g1.torsion {
        for _ in 0..g2.free_rank {
            out.torsion.push(t.clone());
        }
    }
    // Z^a tensor Z[1/m]^b
    for (rad, e) in &g2.localized {
        if g1.free_rank > 0 {
            out.localized.push((rad.clone(), e * g1.free_rank));
        }
    }
    for (rad, e) in &g1.localized {
        if g2.free_rank > 0 {
            out.localized.push((rad.clone(), e * g2.free_rank));
        }
    }
    // Z/a tensor Z/b = Z/gcd(a,b)
    for t1 in &g1.torsion {
        for t2 in &g2.torsion {
            let g = t1.gcd(t2);
            if g > BigInt::one() {
                out.torsion.push(g);
            }
        }
    }
    // Z/a tensor Z[1/m] = Z/a' with the primes of m removed from a
    let strip = |t: &BigInt, rad: &BigInt| -> BigInt {
        let mut t = t.clone();
        for (p, _) in factorize(rad) {
            while t.is_multiple_of(&p) {
                t /= &p;
            }
        }
        t
    };
    for t in &g1.torsion {
        for (rad, e) in &g2.localized {
            let t2 = strip(t, rad);
            if t2 > BigInt::one() {
                for _ in 0..*e {
                    out.torsion.push(t2.clone());
                }
            }
        }
    }
    for t in &g2.torsion {
        for (rad, e) in &g1.localized {
            let t2 = strip(t, rad);
            if t2 > BigInt::one() {
                for _ in 0..*e {
                    out.torsion.push(t2.clone());
                }
            }
        }
    }
    // Z[1/m]^a tensor Z[1/n]^b = Z[1/rad(mn)]^{ab}
    for (r1, e1) in &g1.localized {
        for (r2, e2) in &g2.localized {
            out.localized.push((radical(&(r1 * r2)), e1 * e2));
        }
    }
    out.canonicalize();
    Ok(out)
}

/// Searches for a unimodular X with X a = b X inside a bounded coefficient
/// box of the integer solution lattice. A certificate proves
/// lim(a, .) = lim(b, .); absence of one proves nothing.
pub fn z_similarity_certificate(
    a: &IntMatrix,
    b: &IntMatrix,
) -> Result<Option<IntMatrix>, AbGroupError> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(AbGroupError::DimensionMismatch);
    }
    if crate::exactmat::char_poly(a).0 != crate::exactmat::char_poly(b).0 {
        return Err(AbGroupError::CharPolyMismatch);
    }
    let n = a.rows();
    if a == b {
        return Ok(Some(IntMatrix::identity(n)));
    }
    // X a - b X = 0 as a linear system over the n^2 entries of X
    let mut sys = IntMatrix::zero(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let eq = i * n + j;
            for kk in 0..n {
                sys[(eq, i * n + kk)] += a[(kk, j)].clone();
                sys[(eq, kk * n + j)] -= b[(i, kk)].clone();
            }
        }
    }
    let ker = kernel_embedding(&sys);
    let m = ker.free_rank;
    if m == 0 {
        return Ok(None);
    }
    // enumerate small integer combinations of the kernel basis
    let bound: i64 = match m {
        1 => 1,
        2 => 8,
        3 => 5,
        4 => 3,
        _ => 2,
    };
    let mut coeffs = vec![-bound; m];
    loop {
        if coeffs.iter().any(|&c| c != 0) {
            let mut x = IntMatrix::zero(n, n);
            for (v, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        let t = &ker.from_reduced[(i * n + j, v)] * BigInt::from(c);
                        x[(i, j)] += t;
                    }
                }
            }
            if x.is_unimodular() {
                debug_assert_eq!(&x * a, b * &x);
                return Ok(Some(x));
            }
        }
        // advance odometer
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(None);
            }
            coeffs[pos] += 1;
            if coeffs[pos] <= bound {
                break;
            }
            coeffs[pos] = -bound;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn lim(rows: &[Vec<i64>]) -> String {
        limit_free(&m(rows)).canonical()
    }

    #[test]
    fn identity_is_free() {
        assert_eq!(lim(&[vec![1, 0], vec![0, 1]]), "Z^2");
    }

    #[test]
    fn fibonacci_connecting_matrix() {
        // Z-invertible, hence lim = Z^2
        assert_eq!(lim(&[vec![0, 1], vec![1, 1]]), "Z^2");
    }

    #[test]
    fn morse_connecting_matrix() {
        // extract -1, then lim(2, Z) = Z[1/2]
        assert_eq!(lim(&[vec![1, 1], vec![2, 0]]), "Z + Z[1/2]");
    }

    #[test]
    fn one_fifth_connecting_matrix() {
        assert_eq!(lim(&[vec![3, 1], vec![1, 2]]), "Z[1/5]^2");
    }

    #[test]
    fn half_hex_connecting_matrix() {
        assert_eq!(
            lim(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]),
            "Z^2 + Z[1/2]"
        );
    }

    #[test]
    fn pathologic_connecting_matrix_stays_residual() {
        assert_eq!(lim(&[vec![3, 1], vec![1, 6]]), "lim[[3,1],[1,6]]");
    }

    #[test]
    fn one_sixth_and_transpose_agree() {
        assert_eq!(lim(&[vec![6, -2], vec![3, 0]]), "Z[1/6]^2");
        assert_eq!(lim(&[vec![6, 3], vec![-2, 0]]), "Z[1/6]^2");
    }

    #[test]
    fn rudin_shapiro_three_by_three() {
        let a = m(&[vec![-2, 1, -1], vec![-1, 2, 0], vec![1, 0, 2]]);
        assert_eq!(limit_free(&a).canonical(), "Z[1/2]^3");
    }

    #[test]
    fn certificates() {
        assert_eq!(
            certify_localization(&m(&[vec![2]]), 64).unwrap(),
            Some(BigInt::from(2))
        );
        // A^4 = 0 mod 8 certifies Z[1/2]^2
        assert_eq!(
            certify_localization(&m(&[vec![4, 0], vec![1, 2]]), 64).unwrap(),
            Some(BigInt::from(2))
        );
        // the Pathologic matrix is not nilpotent mod 17
        assert_eq!(
            certify_localization(&m(&[vec![3, 1], vec![1, 6]]), 64).unwrap(),
            None
        );
        assert!(certify_localization(&m(&[vec![0]]), 4).is_err());
        // a starved bound fails where k=2 would succeed
        assert_eq!(
            certify_localization(&m(&[vec![3, 1], vec![1, 2]]), 1).unwrap(),
            None
        );
    }

    #[test]
    fn extraction_examples() {
        let (restricted, rank) =
            extract_eigenvalue(&m(&[vec![1, 1], vec![2, 0]]), &BigInt::from(-1)).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(restricted, m(&[vec![2]]));

        let (restricted, rank) =
            extract_eigenvalue(&IntMatrix::identity(3), &BigInt::one()).unwrap();
        assert_eq!(rank, 3);
        assert_eq!(restricted.rows(), 0);

        // restricted matrix of the Pathologic reduction is Z-similar to
        // [[3,1],[1,6]]
        let a = m(&[vec![2, 3, 0], vec![2, 2, 1], vec![1, 6, 4]]);
        let (restricted, rank) = extract_eigenvalue(&a, &BigInt::from(-1)).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(restricted.rows(), 2);
        let cert = z_similarity_certificate(&restricted, &m(&[vec![3, 1], vec![1, 6]]))
            .unwrap();
        assert!(cert.is_some());

        assert!(extract_eigenvalue(&m(&[vec![2]]), &BigInt::from(-1)).is_err());
    }

    #[test]
    fn presented_limits() {
        // Chair K1 data: torsion dies because 2 = 0 mod 2
        let g = PresentedGroup::from_parts(vec![BigInt::from(2), BigInt::from(2)], 2);
        let mm = m(&[
            vec![2, 0, 0, 0],
            vec![0, 2, 0, 0],
            vec![0, 0, 2, 0],
            vec![0, 0, 0, 2],
        ]);
        assert_eq!(limit_presented(&mm, &g).unwrap().canonical(), "Z[1/2]^2");

        // Table K1 data: the lift tau = 1 solves the consistency system
        let g = PresentedGroup::from_parts(vec![BigInt::from(2)], 2);
        let mm = m(&[vec![1, -1, 0], vec![0, 2, 0], vec![0, 0, 2]]);
        assert_eq!(
            limit_presented(&mm, &g).unwrap().canonical(),
            "Z/2 + Z[1/2]^2"
        );

        // identity on Z/3 + Z
        let g = PresentedGroup::from_parts(vec![BigInt::from(3)], 1);
        assert_eq!(
            limit_presented(&IntMatrix::identity(2), &g).unwrap().canonical(),
            "Z + Z/3"
        );

        // half-hex K1 data
        let g = PresentedGroup::from_parts(vec![BigInt::from(2)], 2);
        let mm = m(&[vec![0, -2, -2], vec![0, 2, 0], vec![0, 0, 2]]);
        assert_eq!(limit_presented(&mm, &g).unwrap().canonical(), "Z[1/2]^2");
    }

    #[test]
    fn presented_rejects_bad_maps() {
        let g = PresentedGroup::from_parts(vec![BigInt::from(2)], 1);
        // torsion leaking into the free row cannot define a homomorphism
        let mm = m(&[vec![1, 0], vec![1, 1]]);
        assert!(limit_presented(&mm, &g).is_err());
    }

    #[test]
    fn tensor_rules() {
        let z2 = GroupExpression::free(2);
        assert_eq!(tensor(&z2, &z2).unwrap().canonical(), "Z^4");

        let morse = GroupExpression::free(1)
            .direct_sum(&GroupExpression::localization(&BigInt::from(2), 1));
        assert_eq!(
            tensor(&morse, &morse).unwrap().canonical(),
            "Z + Z[1/2]^3"
        );

        let l5 = GroupExpression::localization(&BigInt::from(5), 2);
        assert_eq!(tensor(&l5, &l5).unwrap().canonical(), "Z[1/5]^4");

        let t2 = GroupExpression::torsion_group(vec![BigInt::from(2)]);
        let t6 = GroupExpression::torsion_group(vec![BigInt::from(6)]);
        assert_eq!(tensor(&t2, &t6).unwrap().canonical(), "Z/2");
        let l2 = GroupExpression::localization(&BigInt::from(2), 1);
        assert_eq!(tensor(&t6, &l2).unwrap().canonical(), "Z/3");

        let residual = GroupExpression::residual_term(m(&[vec![3, 1], vec![1, 6]]));
        assert!(tensor(&residual, &z2).is_err());
    }

    #[test]
    fn similarity_certificates() {
        let a = m(&[vec![3, 1], vec![1, 6]]);
        let b = m(&[vec![5, 3], vec![1, 4]]);
        let x = z_similarity_certificate(&a, &b).unwrap().unwrap();
        assert_eq!(&x * &a, &b * &x);
        assert!(x.is_unimodular());

        assert!(z_similarity_certificate(&a, &a).unwrap().unwrap().is_identity());

        // distinct Z-classes: no unimodular intertwiner exists at all
        let c = m(&[vec![2, 0], vec![0, 2]]);
        let d = m(&[vec![2, 1], vec![0, 2]]);
        assert_eq!(z_similarity_certificate(&c, &d).unwrap(), None);

        assert!(z_similarity_certificate(&a, &c).is_err());
    }

    #[test]
    fn canonical_ordering_and_radicals() {
        let g = GroupExpression::localization(&BigInt::from(4), 1)
            .direct_sum(&GroupExpression::localization(&BigInt::from(2), 2));
        assert_eq!(g.canonical(), "Z[1/2]^3");
        assert_eq!(radical(&BigInt::from(12)), BigInt::from(6));
        assert_eq!(radical(&BigInt::from(17)), BigInt::from(17));
        assert_eq!(
            canonical_invariant_factors(vec![BigInt::from(2), BigInt::from(3)]),
            vec![BigInt::from(6)]
        );
        assert_eq!(
            canonical_invariant_factors(vec![BigInt::from(2), BigInt::from(4)]),
            vec![BigInt::from(2), BigInt::from(4)]
        );
    }

    #[test]
    fn zero_matrix_limits() {
        assert_eq!(lim(&[vec![0, 1], vec![0, 0]]), "0");
        assert_eq!(limit_free(&IntMatrix::zero(0, 0)).canonical(), "0");
    }
}
