//! Two-dimensional block substitutions: unit-square prototiles subdivided
//! into lambda x lambda grids of prototiles, stable cell enumeration, and
//! the stable complex under the bottom-left-child corner homotopy.
//!
//! Orientation conventions: faces counterclockwise, horizontal edges left to
//! right, vertical edges bottom to top. A vertical edge is the ordered pair
//! (left face, right face); a horizontal edge is (bottom face, top face); a
//! vertex is the 2x2 block (SW, SE, NW, NE).

use crate::chaincx::StableComplex;
use crate::exactmat::IntMatrix;
use num::bigint::BigInt;
use num::One;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tiling2DError {
    NotPrimitive { power: usize },
    BadGrid { face: String },
    LambdaTooSmall,
    UnknownFace(String),
    DuplicateFace(String),
}

impl fmt::Display for Tiling2DError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tiling2DError::NotPrimitive { power } => write!(
                f,
                "face substitution matrix is not primitive: M^{power} has zero entries"
            ),
            Tiling2DError::BadGrid { face } => {
                write!(f, "replacement grid for {face:?} is not lambda x lambda")
            }
            Tiling2DError::LambdaTooSmall => write!(f, "lambda must be at least 2"),
            Tiling2DError::UnknownFace(l) => write!(f, "unknown face {l:?}"),
            Tiling2DError::DuplicateFace(l) => write!(f, "duplicate face {l:?}"),
        }
    }
}

impl std::error::Error for Tiling2DError {}

/// A block substitution: each face maps to a lambda x lambda grid of faces.
/// `rules[f][col][row]` with column and row indices starting at the bottom
/// left corner (0-based; row 0 is the bottom row).
#[derive(Debug, Clone)]
pub struct BlockSubstitution2D {
    pub faces: Vec<String>,
    pub lambda: usize,
    rules: Vec<Vec<Vec<usize>>>,
}

impl BlockSubstitution2D {
    /// Builds a substitution from face labels and grids given row by row,
    /// bottom row first: `grids[f][row][col]`.
    pub fn from_grids(
        faces: &[&str],
        lambda: usize,
        grids: &[Vec<Vec<&str>>],
    ) -> Result<Self, Tiling2DError> {
        if lambda < 2 {
            return Err(Tiling2DError::LambdaTooSmall);
        }
        assert_eq!(faces.len(), grids.len());
        let face_list: Vec<String> = faces.iter().map(|s| s.to_string()).collect();
        for (i, l) in face_list.iter().enumerate() {
            if face_list[..i].contains(l) {
                return Err(Tiling2DError::DuplicateFace(l.clone()));
            }
        }
        let lookup = |name: &str| -> Result<usize, Tiling2DError> {
            face_list
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| Tiling2DError::UnknownFace(name.to_string()))
        };
        let mut rules = Vec::new();
        for (f, grid) in grids.iter().enumerate() {
            if grid.len() != lambda || grid.iter().any(|row| row.len() != lambda) {
                return Err(Tiling2DError::BadGrid {
                    face: face_list[f].clone(),
                });
            }
            let mut by_col = vec![vec![0usize; lambda]; lambda];
            for (row, row_faces) in grid.iter().enumerate() {
                for (col, name) in row_faces.iter().enumerate() {
                    by_col[col][row] = lookup(name)?;
                }
            }
            rules.push(by_col);
        }
        let sub = BlockSubstitution2D {
            faces: face_list,
            lambda,
            rules,
        };
        sub.require_primitive()?;
        Ok(sub)
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Child face at 0-based (column, row) of the replacement grid of `f`.
    pub fn child(&self, f: usize, col: usize, row: usize) -> usize {
        self.rules[f][col][row]
    }

    pub fn substitution_matrix(&self) -> IntMatrix {
        let n = self.face_count();
        let mut m = IntMatrix::zero(n, n);
        for (j, grid) in self.rules.iter().enumerate() {
            for col in grid {
                for &i in col {
                    m[(i, j)] += BigInt::one();
                }
            }
        }
        m
    }

    pub fn require_primitive(&self) -> Result<(), Tiling2DError> {
        let n = self.face_count();
        let bound = if n == 1 { 1 } else { (n - 1) * (n - 1) + 1 };
        let mut base = vec![vec![false; n]; n];
        for (j, grid) in self.rules.iter().enumerate() {
            for col in grid {
                for &i in col {
                    base[i][j] = true;
                }
            }
        }
        let mut power = base.clone();
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
            Err(Tiling2DError::NotPrimitive { power: bound })
        }
    }
}

/// Stable cells of a block tiling. Vertical edges are (left, right) pairs,
/// horizontal edges are (bottom, top) pairs, vertices are (SW, SE, NW, NE)
/// blocks; each list is sorted lexicographically.
#[derive(Debug, Clone)]
pub struct StableCells2D {
    pub v_edges: Vec<(usize, usize)>,
    pub h_edges: Vec<(usize, usize)>,
    pub vertices: Vec<(usize, usize, usize, usize)>,
}

impl StableCells2D {
    pub fn edge_count(&self) -> usize {
        self.v_edges.len() + self.h_edges.len()
    }
}

/// A lambda x 2 lambda assembly of two substituted faces sharing a seam.
/// `horizontal` stacks bottom under top; `vertical` puts left beside right.
fn pair_cells_h(
    s: &BlockSubstitution2D,
    bottom: usize,
    top: usize,
) -> impl Fn(usize, usize) -> usize + '_ {
    let l = s.lambda;
    move |col: usize, row: usize| {
        if row < l {
            s.child(bottom, col, row)
        } else {
            s.child(top, col, row - l)
        }
    }
}

fn pair_cells_v(
    s: &BlockSubstitution2D,
    left: usize,
    right: usize,
) -> impl Fn(usize, usize) -> usize + '_ {
    let l = s.lambda;
    move |col: usize, row: usize| {
        if col < l {
            s.child(left, col, row)
        } else {
            s.child(right, col - l, row)
        }
    }
}

/// Closure computation of the legal face pairs and 2x2 blocks: seed with the
/// cells interior to single substituted faces, then repeatedly substitute
/// pairs and blocks and harvest the interior and seam cells of the result.
pub fn stable_cells_2d(s: &BlockSubstitution2D) -> Result<StableCells2D, Tiling2DError> {
    s.require_primitive()?;
    let l = s.lambda;
    let mut h: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut v: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut blocks: BTreeSet<(usize, usize, usize, usize)> = BTreeSet::new();

    for f in 0..s.face_count() {
        for col in 0..l {
            for row in 0..l {
                if row + 1 < l {
                    h.insert((s.child(f, col, row), s.child(f, col, row + 1)));
                }
                if col + 1 < l {
                    v.insert((s.child(f, col, row), s.child(f, col + 1, row)));
                }
                if row + 1 < l && col + 1 < l {
                    blocks.insert((
                        s.child(f, col, row),
                        s.child(f, col + 1, row),
                        s.child(f, col, row + 1),
                        s.child(f, col + 1, row + 1),
                    ));
                }
            }
        }
    }

    loop {
        let mut grew = false;
        for &(b, t) in h.clone().iter() {
            // substituted horizontal pair: lambda wide, 2 lambda tall
            let cell = pair_cells_h(s, b, t);
            for col in 0..l {
                for row in 0..2 * l - 1 {
                    grew |= h.insert((cell(col, row), cell(col, row + 1)));
                    if col + 1 < l {
                        grew |= blocks.insert((
                            cell(col, row),
                            cell(col + 1, row),
                            cell(col, row + 1),
                            cell(col + 1, row + 1),
                        ));
                    }
                }
            }
        }
        for &(lf, rf) in v.clone().iter() {
            let cell = pair_cells_v(s, lf, rf);
            for row in 0..l {
                for col in 0..2 * l - 1 {
                    grew |= v.insert((cell(col, row), cell(col + 1, row)));
                    if row + 1 < l {
                        grew |= blocks.insert((
                            cell(col, row),
                            cell(col + 1, row),
                            cell(col, row + 1),
                            cell(col + 1, row + 1),
                        ));
                    }
                }
            }
        }
        for &(sw, se, nw, ne) in blocks.clone().iter() {
            // substituted 2x2 block: 2 lambda x 2 lambda cells
            let cell = |col: usize, row: usize| -> usize {
                match (col < l, row < l) {
                    (true, true) => s.child(sw, col, row),
                    (false, true) => s.child(se, col - l, row),
                    (true, false) => s.child(nw, col, row - l),
                    (false, false) => s.child(ne, col - l, row - l),
                }
            };
            for col in 0..2 * l {
                for row in 0..2 * l {
                    if row + 1 < 2 * l {
                        grew |= h.insert((cell(col, row), cell(col, row + 1)));
                    }
                    if col + 1 < 2 * l {
                        grew |= v.insert((cell(col, row), cell(col + 1, row)));
                    }
                    if row + 1 < 2 * l && col + 1 < 2 * l {
                        grew |= blocks.insert((
                            cell(col, row),
                            cell(col + 1, row),
                            cell(col, row + 1),
                            cell(col + 1, row + 1),
                        ));
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }

    Ok(StableCells2D {
        v_edges: v.into_iter().collect(),
        h_edges: h.into_iter().collect(),
        vertices: blocks.into_iter().collect(),
    })
}

/// Builds the stable complex of a block substitution under the product
/// corner homotopy (x, y) -> (f(x), f(y)) that expands the bottom-left
/// child, with f linear on [0, 1/lambda] and constant 1 beyond.
///
/// Cell ordering: faces in input order; edges all vertical pairs then all
/// horizontal pairs, each lexicographic; vertices lexicographic by
/// (SW, SE, NW, NE).
pub fn build_complex_2d(s: &BlockSubstitution2D) -> Result<StableComplex, Tiling2DError> {
    let cells = stable_cells_2d(s)?;
    let l = s.lambda;
    let sf = s.face_count();
    let nv = cells.v_edges.len();
    let se = cells.edge_count();
    let sv = cells.vertices.len();

    let v_idx = |e: (usize, usize)| -> usize {
        cells
            .v_edges
            .iter()
            .position(|&f| f == e)
            .expect("vertical edge produced by the rules must be legal")
    };
    let h_idx = |e: (usize, usize)| -> usize {
        nv + cells
            .h_edges
            .iter()
            .position(|&f| f == e)
            .expect("horizontal edge produced by the rules must be legal")
    };
    let b_idx = |b: (usize, usize, usize, usize)| -> usize {
        cells
            .vertices
            .iter()
            .position(|&c| c == b)
            .expect("vertex block produced by the rules must be legal")
    };

    // d1: vertical edge (l, r) -> l - r; horizontal edge (b, t) -> t - b
    let mut delta1 = IntMatrix::zero(sf, se);
    for (i, &(lf, rf)) in cells.v_edges.iter().enumerate() {
        delta1[(lf, i)] += BigInt::one();
        delta1[(rf, i)] -= BigInt::one();
    }
    for (i, &(bf, tf)) in cells.h_edges.iter().enumerate() {
        delta1[(tf, nv + i)] += BigInt::one();
        delta1[(bf, nv + i)] -= BigInt::one();
    }

    // d0: the west and south edges end at the vertex, the east and north
    // edges start there
    let mut delta0 = IntMatrix::zero(se, sv);
    for (col, &(sw, seb, nw, ne)) in cells.vertices.iter().enumerate() {
        delta0[(h_idx((sw, nw)), col)] += BigInt::one(); // west
        delta0[(v_idx((sw, seb)), col)] += BigInt::one(); // south
        delta0[(h_idx((seb, ne)), col)] -= BigInt::one(); // east
        delta0[(v_idx((nw, ne)), col)] -= BigInt::one(); // north
    }

    // W_F: bottom-left child
    let mut wf = IntMatrix::zero(sf, sf);
    for f in 0..sf {
        wf[(s.child(f, 0, 0), f)] = BigInt::one();
    }

    // W_E: a vertical edge collects the vertical children along the bottom
    // row of the left face plus the seam to the right face; horizontal
    // edges do the same along the left column
    let mut we = IntMatrix::zero(se, se);
    for (col, &(lf, rf)) in cells.v_edges.iter().enumerate() {
        for i in 0..l - 1 {
            we[(v_idx((s.child(lf, i, 0), s.child(lf, i + 1, 0))), col)] += BigInt::one();
        }
        we[(v_idx((s.child(lf, l - 1, 0), s.child(rf, 0, 0))), col)] += BigInt::one();
    }
    for (col, &(bf, tf)) in cells.h_edges.iter().enumerate() {
        for j in 0..l - 1 {
            we[(h_idx((s.child(bf, 0, j), s.child(bf, 0, j + 1))), nv + col)] += BigInt::one();
        }
        we[(h_idx((s.child(bf, 0, l - 1), s.child(tf, 0, 0))), nv + col)] += BigInt::one();
    }

    // W_V: the corner points (i, j), 1 <= i, j <= lambda, of the substituted
    // SW face, pulling columns and rows from the substituted neighbors at
    // the seams
    let mut wv = IntMatrix::zero(sv, sv);
    for (col, &(sw, seb, nw, ne)) in cells.vertices.iter().enumerate() {
        for i in 1..=l {
            for j in 1..=l {
                // the 2x2 child block at corner (i, j) in 1-based corner
                // coordinates; grid position (i-1, j-1) is its SW cell
                let at = |ci: usize, cj: usize| -> usize {
                    match (ci < l, cj < l) {
                        (true, true) => s.child(sw, ci, cj),
                        (false, true) => s.child(seb, ci - l, cj),
                        (true, false) => s.child(nw, ci, cj - l),
                        (false, false) => s.child(ne, ci - l, cj - l),
                    }
                };
                let block = (at(i - 1, j - 1), at(i, j - 1), at(i - 1, j), at(i, j));
                wv[(b_idx(block), col)] += BigInt::one();
            }
        }
    }

    let edge_labels: Vec<String> = cells
        .v_edges
        .iter()
        .map(|&(a, b)| format!("{}|{}", s.faces[a], s.faces[b]))
        .chain(
            cells
                .h_edges
                .iter()
                .map(|&(a, b)| format!("{}/{}", s.faces[a], s.faces[b])),
        )
        .collect();
    let vertex_labels: Vec<String> = cells
        .vertices
        .iter()
        .map(|&(a, b, c, d)| {
            format!(
                "({},{},{},{})",
                s.faces[a], s.faces[b], s.faces[c], s.faces[d]
            )
        })
        .collect();

    Ok(StableComplex {
        dim: 2,
        vertex_labels,
        edge_labels,
        face_labels: s.faces.clone(),
        delta0,
        delta1,
        wv,
        we,
        wf,
    })
}
