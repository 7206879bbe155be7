//! One-dimensional substitution systems: stable cell enumeration, the
//! stable complex under the leftmost-edge homotopy, the collared
//! (Anderson-Putnam) cross-check complex, and the parent/section chain maps.

use crate::chaincx::{Diagnostics, StableComplex};
use crate::exactmat::IntMatrix;
use num::bigint::BigInt;
use num::One;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tiling1DError {
    /// The substitution matrix is not primitive: some entry of M^power is
    /// still zero at the Wielandt bound.
    NotPrimitive { power: usize },
    EmptyWord(String),
    /// Every letter maps to a single letter, so nothing inflates.
    NoInflation,
    UnknownLetter(String),
    DuplicateLetter(String),
}

impl fmt::Display for Tiling1DError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tiling1DError::NotPrimitive { power } => write!(
                f,
                "substitution matrix is not primitive: M^{power} has zero entries"
            ),
            Tiling1DError::EmptyWord(l) => write!(f, "replacement word for {l:?} is empty"),
            Tiling1DError::NoInflation => {
                write!(f, "every replacement word has length 1: no inflation")
            }
            Tiling1DError::UnknownLetter(l) => write!(f, "unknown letter {l:?}"),
            Tiling1DError::DuplicateLetter(l) => write!(f, "duplicate letter {l:?}"),
        }
    }
}

impl std::error::Error for Tiling1DError {}

/// A substitution rule on a finite ordered alphabet. Letters are indices
/// into `letters`; each rule is the replacement word.
#[derive(Debug, Clone)]
pub struct Substitution1D {
    pub letters: Vec<String>,
    pub rules: Vec<Vec<usize>>,
}

impl Substitution1D {
    /// Builds a substitution from single-character letters and word strings.
    pub fn from_strings(letters: &[&str], words: &[&str]) -> Result<Self, Tiling1DError> {
        assert_eq!(letters.len(), words.len());
        let letter_list: Vec<String> = letters.iter().map(|s| s.to_string()).collect();
        for (i, l) in letter_list.iter().enumerate() {
            if letter_list[..i].contains(l) {
                return Err(Tiling1DError::DuplicateLetter(l.clone()));
            }
        }
        let mut rules = Vec::new();
        for (letter, word) in letter_list.iter().zip(words.iter()) {
            if word.is_empty() {
                return Err(Tiling1DError::EmptyWord(letter.clone()));
            }
            let mut parsed = Vec::new();
            for ch in word.chars() {
                let s = ch.to_string();
                let idx = letter_list
                    .iter()
                    .position(|l| *l == s)
                    .ok_or(Tiling1DError::UnknownLetter(s))?;
                parsed.push(idx);
            }
            rules.push(parsed);
        }
        let sub = Substitution1D {
            letters: letter_list,
            rules,
        };
        sub.require_primitive()?;
        Ok(sub)
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    /// Count matrix M[i][j] = occurrences of letter i in the word for j.
    pub fn substitution_matrix(&self) -> IntMatrix {
        let n = self.letter_count();
        let mut m = IntMatrix::zero(n, n);
        for (j, word) in self.rules.iter().enumerate() {
            for &i in word {
                m[(i, j)] += BigInt::one();
            }
        }
        m
    }

    /// Primitivity via the Wielandt bound: M is primitive iff every entry of
    /// M^{(n-1)^2 + 1} is positive. Checked on the boolean occurrence
    /// pattern to avoid entry growth.
    pub fn require_primitive(&self) -> Result<(), Tiling1DError> {
        if self.rules.iter().all(|w| w.len() == 1) {
            return Err(Tiling1DError::NoInflation);
        }
        let n = self.letter_count();
        let bound = (n - 1) * (n - 1) + 1;
        let mut reach = vec![vec![false; n]; n];
        for (j, word) in self.rules.iter().enumerate() {
            for &i in word {
                reach[i][j] = true;
            }
        }
        let base = reach.clone();
        let mut power = reach;
        for _ in 1..bound {
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if !power[i][k] {
                        continue;
                    }
                    for (j, &b) in base[k].iter().enumerate() {
                        if b {
                            next[i][j] = true;
                        }
                    }
                }
            }
            power = next;
        }
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            Ok(())
        } else {
            Err(Tiling1DError::NotPrimitive { power: bound })
        }
    }

    fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&l| self.rules[l].clone()).collect()
    }

    pub fn vertex_label(&self, (x, y): (usize, usize)) -> String {
        format!("{}.{}", self.letters[x], self.letters[y])
    }
}

/// The stable cells of a one-dimensional tiling: edges are the proto-edges,
/// vertices are the legal two-letter factors in lexicographic order.
#[derive(Debug, Clone)]
pub struct StableCells1D {
    pub edges: Vec<usize>,
    pub vertices: Vec<(usize, usize)>,
}

impl StableCells1D {
    pub fn vertex_index(&self, v: (usize, usize)) -> usize {
        self.vertices
            .iter()
            .position(|&w| w == v)
            .expect("vertex produced by the substitution must be legal")
    }
}

/// Enumerates the legal two-letter factors: seeds with the factors of
/// expanded supertiles, then iterates the induced factor map
/// (x.y) -> factors of w(x)w(y) to a fixed point.
pub fn stable_cells_1d(s: &Substitution1D) -> Result<StableCells1D, Tiling1DError> {
    s.require_primitive()?;
    let mut seen = std::collections::BTreeSet::new();
    for l in 0..s.letter_count() {
        let mut word = vec![l];
        while word.len() < 2 {
            word = s.apply(&word);
        }
        for pair in word.windows(2) {
            seen.insert((pair[0], pair[1]));
        }
    }
    loop {
        let mut grew = false;
        for (x, y) in seen.clone() {
            let mut joined = s.rules[x].clone();
            joined.extend_from_slice(&s.rules[y]);
            for pair in joined.windows(2) {
                grew |= seen.insert((pair[0], pair[1]));
            }
        }
        if !grew {
            break;
        }
    }
    Ok(StableCells1D {
        edges: (0..s.letter_count()).collect(),
        vertices: seen.into_iter().collect(),
    })
}

/// Builds the stable complex under the homotopy that expands the leftmost
/// child edge:
/// d0(x.y) = x - y,
/// W_E(e) = first letter of w(e),
/// W_V(x.y) = internal vertices of w(x) + (last of w(x)).(first of w(y)).
pub fn build_complex_1d(s: &Substitution1D) -> Result<StableComplex, Tiling1DError> {
    let cells = stable_cells_1d(s)?;
    let sv = cells.vertices.len();
    let se = cells.edges.len();

    let mut delta0 = IntMatrix::zero(se, sv);
    for (col, &(x, y)) in cells.vertices.iter().enumerate() {
        delta0[(x, col)] += BigInt::one();
        delta0[(y, col)] -= BigInt::one();
    }

    let mut we = IntMatrix::zero(se, se);
    for e in 0..se {
        we[(s.rules[e][0], e)] = BigInt::one();
    }

    let mut wv = IntMatrix::zero(sv, sv);
    for (col, &(x, y)) in cells.vertices.iter().enumerate() {
        let wx = &s.rules[x];
        for k in 1..wx.len() {
            let row = cells.vertex_index((wx[k - 1], wx[k]));
            wv[(row, col)] += BigInt::one();
        }
        let junction = (*wx.last().unwrap(), s.rules[y][0]);
        let row = cells.vertex_index(junction);
        wv[(row, col)] += BigInt::one();
    }

    Ok(StableComplex {
        dim: 1,
        vertex_labels: cells
            .vertices
            .iter()
            .map(|&v| s.vertex_label(v))
            .collect(),
        edge_labels: s.letters.clone(),
        face_labels: vec![],
        delta0,
        delta1: IntMatrix::zero(0, se),
        wv,
        we,
        wf: IntMatrix::zero(0, 0),
    })
}

/// Perron eigenvalue and tile lengths by power iteration at double
/// precision. Informational only; never used in any group computation.
pub fn perron_data(s: &Substitution1D) -> Result<(f64, Vec<f64>), Tiling1DError> {
    s.require_primitive()?;
    let n = s.letter_count();
    let m = s.substitution_matrix();
    let mf: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v: BigInt = m[(i, j)].clone();
                    i64::try_from(&v).unwrap_or(i64::MAX) as f64
                })
                .collect()
        })
        .collect();
    // lengths satisfy len . M = lambda len, i.e. they form a left Perron
    // eigenvector
    let mut lens = vec![1.0f64; n];
    let mut lambda = 1.0f64;
    for _ in 0..2000 {
        let mut next = vec![0.0; n];
        for (j, nj) in next.iter_mut().enumerate() {
            for (i, li) in lens.iter().enumerate() {
                *nj += mf[i][j] * li;
            }
        }
        let norm = next.iter().cloned().fold(0.0f64, f64::max);
        if norm == 0.0 {
            break;
        }
        lambda = norm;
        for x in next.iter_mut() {
            *x /= norm;
        }
        let delta: f64 = next
            .iter()
            .zip(lens.iter())
            .map(|(a, b)| (a - b).abs())
            .sum();
        lens = next;
        if delta < 1e-14 {
            break;
        }
    }
    Ok((lambda, lens))
}

/// The collared (Anderson-Putnam) complex of a one-dimensional tiling:
/// collared vertices coincide with stable vertices, collared edges are the
/// legal three-letter factors x(y)z.
#[derive(Debug, Clone)]
pub struct CollaredComplex1D {
    pub vertices: Vec<(usize, usize)>,
    /// (left neighbor, edge, right neighbor)
    pub edges: Vec<(usize, usize, usize)>,
    /// cV x cE; column xyz = [x.y] - [y.z]
    pub boundary1: IntMatrix,
    /// cV x cV collared substitution on vertices
    pub omega_v: IntMatrix,
    /// cE x cE collared substitution on edges
    pub omega_e: IntMatrix,
}

impl CollaredComplex1D {
    pub fn edge_label(&self, s: &Substitution1D, (x, y, z): (usize, usize, usize)) -> String {
        format!(
            "{}({}){}",
            s.letters[x], s.letters[y], s.letters[z]
        )
    }
}

pub fn collared_complex_1d(s: &Substitution1D) -> Result<CollaredComplex1D, Tiling1DError> {
    let cells = stable_cells_1d(s)?;
    let vertices = cells.vertices.clone();

    // legal 3-factor closure, seeded from expanded supertiles
    let mut seen = std::collections::BTreeSet::new();
    for l in 0..s.letter_count() {
        let mut word = vec![l];
        while word.len() < 3 {
            word = s.apply(&word);
        }
        for t in word.windows(3) {
            seen.insert((t[0], t[1], t[2]));
        }
    }
    let children = |&(x, y, z): &(usize, usize, usize)| -> Vec<(usize, usize, usize)> {
        let wy = &s.rules[y];
        let last_x = *s.rules[x].last().unwrap();
        let first_z = s.rules[z][0];
        (0..wy.len())
            .map(|i| {
                let prev = if i == 0 { last_x } else { wy[i - 1] };
                let next = if i + 1 == wy.len() { first_z } else { wy[i + 1] };
                (prev, wy[i], next)
            })
            .collect()
    };
    loop {
        let mut grew = false;
        for t in seen.clone() {
            for c in children(&t) {
                grew |= seen.insert(c);
            }
        }
        if !grew {
            break;
        }
    }
    let edges: Vec<(usize, usize, usize)> = seen.into_iter().collect();

    let v_idx = |v: (usize, usize)| -> usize {
        vertices
            .iter()
            .position(|&w| w == v)
            .expect("collared boundary vertex must be legal")
    };
    let e_idx = |e: (usize, usize, usize)| -> usize {
        edges
            .iter()
            .position(|&f| f == e)
            .expect("collared substitution child must be legal")
    };

    let cv = vertices.len();
    let ce = edges.len();

    let mut boundary1 = IntMatrix::zero(cv, ce);
    for (col, &(x, y, z)) in edges.iter().enumerate() {
        boundary1[(v_idx((x, y)), col)] += BigInt::one();
        boundary1[(v_idx((y, z)), col)] -= BigInt::one();
    }

    let mut omega_v = IntMatrix::zero(cv, cv);
    for (col, &(x, y)) in vertices.iter().enumerate() {
        let target = (*s.rules[x].last().unwrap(), s.rules[y][0]);
        omega_v[(v_idx(target), col)] += BigInt::one();
    }

    let mut omega_e = IntMatrix::zero(ce, ce);
    for (col, t) in edges.iter().enumerate() {
        for c in children(t) {
            omega_e[(e_idx(c), col)] += BigInt::one();
        }
    }

    Ok(CollaredComplex1D {
        vertices,
        edges,
        boundary1,
        omega_v,
        omega_e,
    })
}

/// Forgetful and inclusion maps relating stable and collared cells:
/// F_E(x(y)z) = y.z, F_V(x.y) = y, i_E(y.z) = some legal x(y)z,
/// i_V(y) = some legal x.y. The six identities below hold for any choice of
/// representative; we take the first in cell order.
pub struct ForgetfulMaps {
    pub f_v: IntMatrix,
    pub f_e: IntMatrix,
    pub i_v: IntMatrix,
    pub i_e: IntMatrix,
}

pub fn forgetful_maps(cells: &StableCells1D, collared: &CollaredComplex1D) -> ForgetfulMaps {
    let sv = cells.vertices.len();
    let se = cells.edges.len();
    let ce = collared.edges.len();

    let mut f_v = IntMatrix::zero(se, sv);
    for (col, &(_, y)) in cells.vertices.iter().enumerate() {
        f_v[(y, col)] = BigInt::one();
    }
    let mut f_e = IntMatrix::zero(sv, ce);
    for (col, &(_, y, z)) in collared.edges.iter().enumerate() {
        f_e[(cells.vertex_index((y, z)), col)] = BigInt::one();
    }
    let mut i_v = IntMatrix::zero(sv, se);
    for e in 0..se {
        let row = cells
            .vertices
            .iter()
            .position(|&(_, y)| y == e)
            .expect("every letter has a legal left extension");
        i_v[(row, e)] = BigInt::one();
    }
    let mut i_e = IntMatrix::zero(ce, sv);
    for (col, &(x, y)) in cells.vertices.iter().enumerate() {
        let row = collared
            .edges
            .iter()
            .position(|&(_, m, r)| m == x && r == y)
            .expect("every legal pair has a legal left extension");
        i_e[(row, col)] = BigInt::one();
    }
    ForgetfulMaps { f_v, f_e, i_v, i_e }
}

/// Verifies the six stable-collared relations as exact matrix identities.
pub fn forgetful_inclusion_relations(s: &Substitution1D) -> Result<Diagnostics, Tiling1DError> {
    let cells = stable_cells_1d(s)?;
    let complex = build_complex_1d(s)?;
    let collared = collared_complex_1d(s)?;
    let maps = forgetful_maps(&cells, &collared);

    let mut d = Diagnostics::default();
    let lhs = &(&maps.f_v * &collared.omega_v) * &maps.i_v;
    d.check("W_E = F_V . omega_V . i_V", lhs == complex.we, || {
        format!("{lhs} vs {}", complex.we)
    });
    let lhs = &(&maps.f_e * &collared.omega_e) * &maps.i_e;
    d.check("W_V = F_E . omega_E . i_E", lhs == complex.wv, || {
        format!("{lhs} vs {}", complex.wv)
    });
    let lhs = &(&maps.f_v * &collared.boundary1) * &maps.i_e;
    d.check("d0 = F_V . boundary1 . i_E", lhs == complex.delta0, || {
        format!("{lhs} vs {}", complex.delta0)
    });
    let lhs = &maps.f_v * &collared.boundary1;
    let rhs = &complex.delta0 * &maps.f_e;
    d.check("F_V . boundary1 = d0 . F_E", lhs == rhs, || {
        format!("{lhs} vs {rhs}")
    });
    let lhs = &maps.f_v * &collared.omega_v;
    let rhs = &complex.we * &maps.f_v;
    d.check("F_V . omega_V = W_E . F_V", lhs == rhs, || {
        format!("{lhs} vs {rhs}")
    });
    let lhs = &maps.f_e * &collared.omega_e;
    let rhs = &complex.wv * &maps.f_e;
    d.check("F_E . omega_E = W_V . F_E", lhs == rhs, || {
        format!("{lhs} vs {rhs}")
    });
    Ok(d)
}

/// The chain maps between the one-supertile refinement and the stable
/// complex: `r` replaces the equivalence relation, `g` collapses to the
/// relabeled parent, `s` selects the homotoping child. They satisfy
/// g . s = id and r . s = W degreewise.
#[derive(Debug, Clone)]
pub struct PeMaps1D {
    /// stable vertices x refinement vertex classes
    pub r0: IntMatrix,
    /// stable edges x refinement edge classes
    pub r1: IntMatrix,
    pub g0: IntMatrix,
    pub g1: IntMatrix,
    /// refinement vertex classes x stable vertices
    pub s0: IntMatrix,
    /// refinement edge classes x stable edges
    pub s1: IntMatrix,
    pub vertex_classes: Vec<String>,
    pub edge_classes: Vec<String>,
}

/// Enumerates the cells of the tiling refined by the parent equivalence:
/// edge classes are (parent letter, child position); vertex classes are the
/// supertile junctions (one per stable vertex) followed by the internal
/// positions of each supertile.
pub fn pe_maps_1d(s: &Substitution1D) -> Result<PeMaps1D, Tiling1DError> {
    let cells = stable_cells_1d(s)?;
    let sv = cells.vertices.len();
    let se = cells.edges.len();

    let edge_classes: Vec<(usize, usize)> = (0..se)
        .flat_map(|p| (0..s.rules[p].len()).map(move |k| (p, k)))
        .collect();
    // junction classes first (indexed like stable vertices), then internal
    // classes (parent, position)
    let internal_classes: Vec<(usize, usize)> = (0..se)
        .flat_map(|p| (1..s.rules[p].len()).map(move |k| (p, k)))
        .collect();
    let n_vc = sv + internal_classes.len();
    let n_ec = edge_classes.len();

    let mut r0 = IntMatrix::zero(sv, n_vc);
    let mut g0 = IntMatrix::zero(sv, n_vc);
    let mut s0 = IntMatrix::zero(n_vc, sv);
    let mut r1 = IntMatrix::zero(se, n_ec);
    let mut g1 = IntMatrix::zero(se, n_ec);
    let mut s1 = IntMatrix::zero(n_ec, se);

    for (col, &(x, y)) in cells.vertices.iter().enumerate() {
        // a junction of supertiles x', y' is the stable vertex
        // (last child of x).(first child of y)
        let target = (*s.rules[x].last().unwrap(), s.rules[y][0]);
        r0[(cells.vertex_index(target), col)] = BigInt::one();
        g0[(col, col)] = BigInt::one();
        // the section: the junction plus every internal vertex of the left
        // supertile homotopes onto the stable vertex
        s0[(col, col)] = BigInt::one();
        for (i, &(p, _)) in internal_classes.iter().enumerate() {
            if p == x {
                s0[(sv + i, col)] = BigInt::one();
            }
        }
    }
    for (i, &(p, k)) in internal_classes.iter().enumerate() {
        let target = (s.rules[p][k - 1], s.rules[p][k]);
        r0[(cells.vertex_index(target), sv + i)] = BigInt::one();
        // internal vertices collapse under the parent map
    }
    for (col, &(p, k)) in edge_classes.iter().enumerate() {
        r1[(s.rules[p][k], col)] = BigInt::one();
        g1[(p, col)] = BigInt::one();
        if k == 0 {
            s1[(col, p)] = BigInt::one();
        }
    }

    let vertex_classes = cells
        .vertices
        .iter()
        .map(|&(x, y)| format!("{}'.{}'", s.letters[x], s.letters[y]))
        .chain(
            internal_classes
                .iter()
                .map(|&(p, k)| format!("{}'_v{k}", s.letters[p])),
        )
        .collect();
    let edge_classes_labels = edge_classes
        .iter()
        .map(|&(p, k)| format!("{}'_e{k}", s.letters[p]))
        .collect();

    Ok(PeMaps1D {
        r0,
        r1,
        g0,
        g1,
        s0,
        s1,
        vertex_classes,
        edge_classes: edge_classes_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fibonacci() -> Substitution1D {
        Substitution1D::from_strings(&["a", "b"], &["ab", "a"]).unwrap()
    }

    fn morse() -> Substitution1D {
        Substitution1D::from_strings(&["a", "b"], &["ab", "ba"]).unwrap()
    }

    fn pathologic() -> Substitution1D {
        Substitution1D::from_strings(&["a", "b"], &["babbaaa", "abbbbb"]).unwrap()
    }

    #[test]
    fn fibonacci_cells() {
        let cells = stable_cells_1d(&fibonacci()).unwrap();
        assert_eq!(cells.vertices, vec![(0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn morse_cells() {
        let cells = stable_cells_1d(&morse()).unwrap();
        assert_eq!(cells.vertices.len(), 4);
    }

    #[test]
    fn single_letter_doubling() {
        let s = Substitution1D::from_strings(&["a"], &["aa"]).unwrap();
        let cells = stable_cells_1d(&s).unwrap();
        assert_eq!(cells.vertices, vec![(0, 0)]);
    }

    #[test]
    fn non_primitive_rejected() {
        // two letters that never mix
        let err = Substitution1D::from_strings(&["a", "b"], &["aa", "bb"]).unwrap_err();
        assert!(matches!(err, Tiling1DError::NotPrimitive { power: 2 }));
        assert!(matches!(
            Substitution1D::from_strings(&["a"], &["a"]).unwrap_err(),
            Tiling1DError::NoInflation
        ));
    }

    #[test]
    fn fibonacci_matrices_match_printed_values() {
        let c = build_complex_1d(&fibonacci()).unwrap();
        assert_eq!(c.we, IntMatrix::from_rows(&[vec![1, 1], vec![0, 0]]));
        assert_eq!(
            c.wv,
            IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 1, 0], vec![1, 1, 0]])
        );
        assert_eq!(
            c.delta0,
            IntMatrix::from_rows(&[vec![0, 1, -1], vec![0, -1, 1]])
        );
    }

    #[test]
    fn morse_matrices_match_printed_values() {
        let c = build_complex_1d(&morse()).unwrap();
        assert_eq!(c.we, IntMatrix::identity(2));
        assert_eq!(
            c.wv,
            IntMatrix::from_rows(&[
                vec![0, 0, 1, 0],
                vec![1, 1, 0, 1],
                vec![1, 0, 1, 1],
                vec![0, 1, 0, 0],
            ])
        );
    }

    #[test]
    fn pathologic_wv_first_column() {
        let c = build_complex_1d(&pathologic()).unwrap();
        let col: Vec<BigInt> = (0..4).map(|i| c.wv[(i, 0)].clone()).collect();
        assert_eq!(
            col,
            vec![
                BigInt::from(2),
                BigInt::from(2),
                BigInt::from(2),
                BigInt::from(1)
            ]
        );
    }

    #[test]
    fn perron_values() {
        let (lambda, _) = perron_data(&fibonacci()).unwrap();
        assert!((lambda - 1.618).abs() < 1e-3);
        let (lambda, lens) = perron_data(&morse()).unwrap();
        assert!((lambda - 2.0).abs() < 1e-9);
        assert!((lens[0] - lens[1]).abs() < 1e-9);
        let s = Substitution1D::from_strings(&["a"], &["aa"]).unwrap();
        let (lambda, _) = perron_data(&s).unwrap();
        assert!((lambda - 2.0).abs() < 1e-9);
    }

    #[test]
    fn fibonacci_collared_counts() {
        let c = collared_complex_1d(&fibonacci()).unwrap();
        assert_eq!(c.vertices.len(), 3);
        // aab, aba, baa, bab
        assert_eq!(
            c.edges,
            vec![(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)]
        );
        // the collared diagram commutes
        assert_eq!(&c.boundary1 * &c.omega_e, &c.omega_v * &c.boundary1);
    }

    #[test]
    fn relations_hold_for_fibonacci_and_morse() {
        for s in [fibonacci(), morse(), pathologic()] {
            let d = forgetful_inclusion_relations(&s).unwrap();
            assert!(d.ok(), "{:?}", d.failed);
        }
    }

    #[test]
    fn corrupted_inclusion_breaks_relation() {
        let s = fibonacci();
        let cells = stable_cells_1d(&s).unwrap();
        let complex = build_complex_1d(&s).unwrap();
        let collared = collared_complex_1d(&s).unwrap();
        let mut maps = forgetful_maps(&cells, &collared);
        // route a.a through the representative of b.a and vice versa
        maps.i_e.swap_cols(0, 2);
        let lhs = &(&maps.f_e * &collared.omega_e) * &maps.i_e;
        assert_ne!(lhs, complex.wv);
    }

    #[test]
    fn fibonacci_pe_maps_match_printed_values() {
        let p = pe_maps_1d(&fibonacci()).unwrap();
        assert_eq!(
            p.r1,
            IntMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 0]])
        );
        assert_eq!(
            p.r0,
            IntMatrix::from_rows(&[
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
                vec![1, 1, 0, 0],
            ])
        );
        assert_eq!(
            p.g0,
            IntMatrix::from_rows(&[
                vec![1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
            ])
        );
        assert_eq!(
            p.g1,
            IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 0, 1]])
        );
        assert_eq!(
            p.s0,
            IntMatrix::from_rows(&[
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 1, 0],
            ])
        );
        assert_eq!(
            p.s1,
            IntMatrix::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 1]])
        );
    }

    #[test]
    fn chain_map_identities() {
        for s in [fibonacci(), morse(), pathologic()] {
            let c = build_complex_1d(&s).unwrap();
            let p = pe_maps_1d(&s).unwrap();
            assert!((&p.g0 * &p.s0).is_identity());
            assert!((&p.g1 * &p.s1).is_identity());
            assert_eq!(&p.r0 * &p.s0, c.wv);
            assert_eq!(&p.r1 * &p.s1, c.we);
        }
    }
}
