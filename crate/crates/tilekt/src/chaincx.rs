//! The stable cochain complex with connecting maps, and its derived stable
//! cohomology and stable-transpose homology direct limits.
//!
//! A complex is the commuting two-row diagram
//!
//! ```text
//! 0 -> Z^sV --d0--> Z^sE --d1--> Z^sF -> 0
//!        |            |            |
//!       W_V          W_E          W_F
//!        v            v            v
//! 0 -> Z^sV --d0--> Z^sE --d1--> Z^sF -> 0
//! ```
//!
//! One-dimensional complexes encode `d1` and `W_F` as empty matrices.

use crate::abgroup::{limit_presented_traced, AbGroupError, GroupExpression, LimitOptions};
use crate::exactmat::{
    cokernel, induced_endo, kernel_embedding, rank, subquotient_ker_over_im, IntMatrix,
    PresentedGroup,
};
use num::bigint::BigInt;
use num::{One, Zero};

#[derive(Clone, Debug)]
pub struct StableComplex {
    pub dim: u8,
    pub vertex_labels: Vec<String>,
    pub edge_labels: Vec<String>,
    pub face_labels: Vec<String>,
    /// sE x sV
    pub delta0: IntMatrix,
    /// sF x sE; 0 x sE when dim = 1
    pub delta1: IntMatrix,
    /// sV x sV
    pub wv: IntMatrix,
    /// sE x sE
    pub we: IntMatrix,
    /// sF x sF; 0 x 0 when dim = 1
    pub wf: IntMatrix,
}

impl StableComplex {
    pub fn counts(&self) -> (usize, usize, usize) {
        (
            self.vertex_labels.len(),
            self.edge_labels.len(),
            self.face_labels.len(),
        )
    }
}

/// Outcome of the structural validation of a complex. Never an error: every
/// failed check is reported with the offending product.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub passed: Vec<String>,
    pub failed: Vec<String>,
}

impl Diagnostics {
    pub fn ok(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.passed.push(name.to_string());
        } else {
            self.failed.push(format!("{name}: {}", detail()));
        }
    }
}

/// Validates every structural invariant of the complex: shapes, the cochain
/// condition d1 d0 = 0, both commuting squares, and in dimension 2 (for a
/// connected face-adjacency graph) that Im d1 is the sum-zero sublattice and
/// coker d1 = Z with W_F inducing the identity on it.
pub fn validate(c: &StableComplex) -> Diagnostics {
    let mut d = Diagnostics::default();
    let (sv, se, sf) = c.counts();

    let shapes_ok = c.delta0.rows() == se
        && c.delta0.cols() == sv
        && c.delta1.rows() == sf
        && c.delta1.cols() == se
        && c.wv.rows() == sv
        && c.wv.cols() == sv
        && c.we.rows() == se
        && c.we.cols() == se
        && c.wf.rows() == sf
        && c.wf.cols() == sf;
    d.check("matrix shapes match label lists", shapes_ok, || {
        format!(
            "delta0 {}x{}, delta1 {}x{}, wv {}x{}, we {}x{}, wf {}x{} for sV={sv} sE={se} sF={sf}",
            c.delta0.rows(),
            c.delta0.cols(),
            c.delta1.rows(),
            c.delta1.cols(),
            c.wv.rows(),
            c.wv.cols(),
            c.we.rows(),
            c.we.cols(),
            c.wf.rows(),
            c.wf.cols()
        )
    });
    if !shapes_ok {
        return d;
    }

    let dd = &c.delta1 * &c.delta0;
    d.check("d1 . d0 = 0", dd.is_zero(), || format!("d1*d0 = {dd}"));

    let lhs = &c.we * &c.delta0;
    let rhs = &c.delta0 * &c.wv;
    d.check("W_E . d0 = d0 . W_V", lhs == rhs, || {
        format!("W_E*d0 = {lhs}, d0*W_V = {rhs}")
    });

    let lhs = &c.wf * &c.delta1;
    let rhs = &c.delta1 * &c.we;
    d.check("W_F . d1 = d1 . W_E", lhs == rhs, || {
        format!("W_F*d1 = {lhs}, d1*W_E = {rhs}")
    });

    if c.dim == 2 {
        if faces_connected(&c.delta1, sf) {
            let col_sums_zero = (0..se).all(|j| {
                (0..sf)
                    .map(|i| c.delta1[(i, j)].clone())
                    .sum::<BigInt>()
                    .is_zero()
            });
            let rank_d1 = rank(&c.delta1);
            d.check(
                "Im d1 is the sum-zero sublattice",
                col_sums_zero && rank_d1 + 1 == sf,
                || format!("column sums zero: {col_sums_zero}, rank d1 = {rank_d1}, sF = {sf}"),
            );
            let cok = cokernel(&c.delta1);
            let coker_is_z = cok.free_rank == 1 && cok.torsion_factors.is_empty();
            d.check("coker d1 = Z", coker_is_z, || {
                format!(
                    "free rank {}, torsion {:?}",
                    cok.free_rank, cok.torsion_factors
                )
            });
            if coker_is_z {
                match induced_endo(&c.wf, &cok) {
                    Ok(m) => {
                        d.check("W_F acts as the identity on coker d1", m.is_identity(), || {
                            format!("induced matrix {m}")
                        })
                    }
                    Err(e) => d.check("W_F acts as the identity on coker d1", false, || {
                        e.to_string()
                    }),
                }
            }
            // ker d1^t is spanned by (1,...,1) and W_F^t fixes it, i.e. the
            // columns of W_F each sum to 1
            let wf_col_sums_one = (0..sf).all(|j| {
                (0..sf)
                    .map(|i| c.wf[(i, j)].clone())
                    .sum::<BigInt>()
                    .is_one()
            });
            d.check(
                "ker d1^t = Z(1,...,1) fixed by W_F^t",
                wf_col_sums_one && rank_d1 + 1 == sf,
                || "a W_F column sum differs from 1".to_string(),
            );
        } else {
            d.failed
                .push("face adjacency graph is disconnected".to_string());
        }
    }
    d
}

fn faces_connected(delta1: &IntMatrix, sf: usize) -> bool {
    if sf == 0 {
        return true;
    }
    let mut seen = vec![false; sf];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(f) = stack.pop() {
        for e in 0..delta1.cols() {
            if delta1[(f, e)].is_zero() {
                continue;
            }
            for g in 0..sf {
                if !seen[g] && !delta1[(g, e)].is_zero() {
                    seen[g] = true;
                    stack.push(g);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A cohomology or homology group at one degree, before the limit.
#[derive(Clone, Debug)]
pub struct FiniteLevel {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    /// Induced endomorphism on reduced coordinates (torsion first).
    pub endo: IntMatrix,
}

impl FiniteLevel {
    fn of(group: &PresentedGroup, endo: &IntMatrix) -> FiniteLevel {
        FiniteLevel {
            free_rank: group.free_rank,
            torsion: group.torsion_factors.clone(),
            endo: endo.clone(),
        }
    }

    pub fn describe(&self) -> String {
        GroupExpression::free(self.free_rank)
            .direct_sum(&GroupExpression::torsion_group(self.torsion.clone()))
            .canonical()
    }
}

/// The three limit groups of one route, with the finite-level data retained:
/// the limit may lose information, e.g. torsion killed by the connecting map.
#[derive(Clone, Debug)]
pub struct HomologyResult {
    pub h0: GroupExpression,
    pub h1: GroupExpression,
    pub h2: GroupExpression,
    pub finite: [FiniteLevel; 3],
    pub traces: [Vec<String>; 3],
}

fn limit_of(
    group: &PresentedGroup,
    w: &IntMatrix,
    opts: LimitOptions,
) -> Result<(GroupExpression, FiniteLevel, Vec<String>), AbGroupError> {
    let endo = induced_endo(w, group).map_err(AbGroupError::from)?;
    let (expr, trace) = limit_presented_traced(&endo, group, opts)?;
    Ok((expr, FiniteLevel::of(group, &endo), trace))
}

/// Stable cohomology: H^0 = lim(ker d0, W_V), H^1 = lim(ker d1/Im d0, W_E),
/// H^2 = lim(coker d1, W_F).
pub fn stable_cohomology(
    c: &StableComplex,
    opts: LimitOptions,
) -> Result<HomologyResult, AbGroupError> {
    let h0_group = kernel_embedding(&c.delta0);
    let h1_group = subquotient_ker_over_im(&c.delta1, &c.delta0).map_err(AbGroupError::from)?;
    let h2_group = cokernel(&c.delta1);

    let (h0, f0, t0) = limit_of(&h0_group, &c.wv, opts)?;
    let (h1, f1, t1) = limit_of(&h1_group, &c.we, opts)?;
    let (h2, f2, t2) = limit_of(&h2_group, &c.wf, opts)?;

    Ok(HomologyResult {
        h0,
        h1,
        h2,
        finite: [f0, f1, f2],
        traces: [t0, t1, t2],
    })
}

/// Stable-transpose homology: H_0 = lim(coker d0^t, W_V^t),
/// H_1 = lim(ker d0^t / Im d1^t, W_E^t), H_2 = lim(ker d1^t, W_F^t).
pub fn stable_transpose_homology(
    c: &StableComplex,
    opts: LimitOptions,
) -> Result<HomologyResult, AbGroupError> {
    let d0t = c.delta0.transpose();
    let d1t = c.delta1.transpose();

    let h0_group = cokernel(&d0t);
    let h1_group = subquotient_ker_over_im(&d0t, &d1t).map_err(AbGroupError::from)?;
    let h2_group = kernel_embedding(&d1t);

    let (h0, f0, t0) = limit_of(&h0_group, &c.wv.transpose(), opts)?;
    let (h1, f1, t1) = limit_of(&h1_group, &c.we.transpose(), opts)?;
    let (h2, f2, t2) = limit_of(&h2_group, &c.wf.transpose(), opts)?;

    Ok(HomologyResult {
        h0,
        h1,
        h2,
        finite: [f0, f1, f2],
        traces: [t0, t1, t2],
    })
}

/// Finite-level universal-coefficient check:
/// H_k(C^ST) = torsion(H^{k+1}(C_S)) + Z^{rank H^k(C_S)} for k = 0, 1, 2,
/// using Ext(G, Z) = torsion(G) and Hom(G, Z) = Z^{rank G} for finitely
/// generated G. Stable torsion of level k+1 must reappear at unstable
/// level k.
pub fn uct_decomposition_check(c: &StableComplex, opts: LimitOptions) -> Diagnostics {
    let mut d = Diagnostics::default();
    let stable = match stable_cohomology(c, opts) {
        Ok(s) => s,
        Err(e) => {
            d.failed.push(format!("stable route failed: {e}"));
            return d;
        }
    };
    let transpose = match stable_transpose_homology(c, opts) {
        Ok(s) => s,
        Err(e) => {
            d.failed.push(format!("transpose route failed: {e}"));
            return d;
        }
    };
    for k in 0..3 {
        let st = &transpose.finite[k];
        let s_rank = stable.finite[k].free_rank;
        let s_tor_above: &[BigInt] = if k + 1 < 3 {
            &stable.finite[k + 1].torsion
        } else {
            &[]
        };
        d.check(
            &format!(
                "H_{k}(C^ST) = torsion(H^{}(C_S)) + Z^rank(H^{k}(C_S))",
                k + 1
            ),
            st.free_rank == s_rank && st.torsion == s_tor_above,
            || {
                format!(
                    "unstable level {k}: rank {} torsion {:?}; stable rank {} torsion above {:?}",
                    st.free_rank, st.torsion, s_rank, s_tor_above
                )
            },
        );
    }
    d
}

/// Euler characteristic of the finite-level stable cohomology equals
/// sV - sE + sF.
pub fn euler_characteristic_consistent(c: &StableComplex, h: &HomologyResult) -> bool {
    let (sv, se, sf) = c.counts();
    let chi_cells = sv as i64 - se as i64 + sf as i64;
    let chi_h = h.finite[0].free_rank as i64 - h.finite[1].free_rank as i64
        + h.finite[2].free_rank as i64;
    chi_cells == chi_h
}
