//! Assembles K-groups of the stable (S), unstable (U) and asymptotic (A)
//! algebras from the homology results, applies the tensor-product formulas,
//! and runs the torsion-placement checks.

use crate::abgroup::{tensor, AbGroupError, GroupExpression};
use crate::chaincx::{Diagnostics, HomologyResult};

#[derive(Debug, Clone)]
pub struct KTheoryReport {
    pub dim: u8,
    pub k0_s: GroupExpression,
    pub k1_s: GroupExpression,
    pub k0_u: GroupExpression,
    pub k1_u: GroupExpression,
    /// Absent when a tensor operand is unresolved or carries torsion.
    pub k0_a: Option<GroupExpression>,
    pub k1_a: Option<GroupExpression>,
    pub notes: Vec<String>,
}

/// K-theory of the stable algebra.
/// Line: K0 = H^0_S and K1 = Z. Plane: K1 = H^1_S, and K0 is an extension
/// of H^0_S by Z which is simplified to a direct sum only when H^0_S is
/// free abelian (Ext(Z^n, Z) = 0); otherwise the extension record is kept,
/// since whether it splits is open.
pub fn k_stable(
    h: &HomologyResult,
    dim: u8,
    notes: &mut Vec<String>,
) -> (GroupExpression, GroupExpression) {
    match dim {
        1 => (h.h0.clone(), GroupExpression::free(1)),
        _ => {
            let k0 = if h.h0.is_free_abelian() {
                GroupExpression::free(1).direct_sum(&h.h0)
            } else {
                notes.push(
                    "K0(S) kept as an extension of H^0_S by Z: splitness is not known".into(),
                );
                GroupExpression::extension_of(GroupExpression::free(1), h.h0.clone())
            };
            (k0, h.h1.clone())
        }
    }
}

/// K-theory of the unstable algebra.
/// Line: K0 = H_0^ST and K1 = Z. Plane: K0 = Z + H_0^ST and K1 = H_1^ST.
pub fn k_unstable(
    h: &HomologyResult,
    dim: u8,
    notes: &mut Vec<String>,
) -> (GroupExpression, GroupExpression) {
    match dim {
        1 => (h.h0.clone(), GroupExpression::free(1)),
        _ => {
            let k0 = sum_with_z(&h.h0, notes);
            (k0, h.h1.clone())
        }
    }
}

/// Z + G, pushing the free summand into the subgroup when G is only known
/// as an extension record.
fn sum_with_z(g: &GroupExpression, notes: &mut Vec<String>) -> GroupExpression {
    match &g.extension {
        None => GroupExpression::free(1).direct_sum(g),
        Some(parts) => {
            notes.push("free summand absorbed into an extension record".into());
            GroupExpression::extension_of(
                GroupExpression::free(1).direct_sum(&parts.0),
                parts.1.clone(),
            )
        }
    }
}

/// K-theory of the asymptotic algebra from those of S and U.
/// Line: K0(A) = (K0(S) tensor K0(U)) + Z and K1(A) = K0(S) + K0(U).
/// Plane, when all four inputs are torsion free and fully resolved:
/// K0(A) = K0 tensor K0 + K1 tensor K1, K1(A) = K0 tensor K1 + K1 tensor K0.
pub fn k_asymptotic(
    ks: &(GroupExpression, GroupExpression),
    ku: &(GroupExpression, GroupExpression),
    dim: u8,
    notes: &mut Vec<String>,
) -> (Option<GroupExpression>, Option<GroupExpression>) {
    let operands = [&ks.0, &ks.1, &ku.0, &ku.1];
    if dim == 1 {
        if !ks.0.is_resolved() || !ku.0.is_resolved() {
            notes.push("K(A) not computable: residual operand".into());
            return (None, None);
        }
        match tensor(&ks.0, &ku.0) {
            Ok(t) => {
                let k0 = t.direct_sum(&GroupExpression::free(1));
                let k1 = ks.0.direct_sum(&ku.0);
                (Some(k0), Some(k1))
            }
            Err(e) => {
                notes.push(format!("K(A) not computable: {e}"));
                (None, None)
            }
        }
    } else {
        if operands.iter().any(|g| !g.is_resolved()) {
            notes.push("K(A) not computable: unresolved operand".into());
            return (None, None);
        }
        if operands.iter().any(|g| !g.is_torsion_free()) {
            notes.push("Kunneth formula precondition violated: torsion present".into());
            return (None, None);
        }
        let pair = |a: &GroupExpression,
                    b: &GroupExpression,
                    c: &GroupExpression,
                    d: &GroupExpression|
         -> Result<GroupExpression, AbGroupError> {
            Ok(tensor(a, b)?.direct_sum(&tensor(c, d)?))
        };
        match (
            pair(&ks.0, &ku.0, &ks.1, &ku.1),
            pair(&ks.0, &ku.1, &ks.1, &ku.0),
        ) {
            (Ok(k0), Ok(k1)) => (Some(k0), Some(k1)),
            (Err(e), _) | (_, Err(e)) => {
                notes.push(format!("K(A) not computable: {e}"));
                (None, None)
            }
        }
    }
}

/// Assembles the full report from the two homology routes.
pub fn k_theory_report(
    stable: &HomologyResult,
    transpose: &HomologyResult,
    dim: u8,
) -> KTheoryReport {
    let mut notes = Vec::new();
    let ks = k_stable(stable, dim, &mut notes);
    let ku = k_unstable(transpose, dim, &mut notes);
    let (k0_a, k1_a) = k_asymptotic(&ks, &ku, dim, &mut notes);
    for (name, g) in [("K0(S)", &ks.0), ("K1(S)", &ks.1), ("K0(U)", &ku.0), ("K1(U)", &ku.1)] {
        if !g.residual.is_empty() {
            notes.push(format!("{name} contains a residual limit term"));
        }
        if g.extension.is_some() {
            notes.push(format!("{name} is recorded as an unresolved extension"));
        }
    }
    let report = KTheoryReport {
        dim,
        k0_s: ks.0,
        k1_s: ks.1,
        k0_u: ku.0,
        k1_u: ku.1,
        k0_a,
        k1_a,
        notes,
    };
    report
}

/// Torsion may appear only where the torsion-placement corollary allows it:
/// nowhere on the line; only in K1(S) and K0(U) on the plane.
pub fn torsion_placement_check(report: &KTheoryReport) -> Diagnostics {
    let mut d = Diagnostics::default();
    let mut groups: Vec<(&str, &GroupExpression)> = vec![
        ("K0(S)", &report.k0_s),
        ("K1(S)", &report.k1_s),
        ("K0(U)", &report.k0_u),
        ("K1(U)", &report.k1_u),
    ];
    if let Some(g) = &report.k0_a {
        groups.push(("K0(A)", g));
    }
    if let Some(g) = &report.k1_a {
        groups.push(("K1(A)", g));
    }
    for (name, g) in groups {
        let torsion_allowed = report.dim == 2 && (name == "K1(S)" || name == "K0(U)");
        if torsion_allowed {
            d.passed.push(format!("{name}: torsion permitted"));
        } else {
            d.check(
                &format!("{name} is torsion free"),
                g.is_torsion_free(),
                || g.canonical(),
            );
        }
    }
    if report.dim == 1 {
        d.check(
            "K1(S) = Z on the line",
            report.k1_s.canonical() == "Z",
            || report.k1_s.canonical(),
        );
        d.check(
            "K1(U) = Z on the line",
            report.k1_u.canonical() == "Z",
            || report.k1_u.canonical(),
        );
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::LimitOptions;
    use crate::chaincx::{stable_cohomology, stable_transpose_homology};
    use crate::tiling1d::{build_complex_1d, Substitution1D};
    use num::bigint::BigInt;

    fn report_for(letters: &[&str], words: &[&str]) -> KTheoryReport {
        let s = Substitution1D::from_strings(letters, words).unwrap();
        let c = build_complex_1d(&s).unwrap();
        let stable = stable_cohomology(&c, LimitOptions::default()).unwrap();
        let transpose = stable_transpose_homology(&c, LimitOptions::default()).unwrap();
        k_theory_report(&stable, &transpose, 1)
    }

    #[test]
    fn fibonacci_k_groups() {
        let r = report_for(&["a", "b"], &["ab", "a"]);
        assert_eq!(r.k0_s.canonical(), "Z^2");
        assert_eq!(r.k1_s.canonical(), "Z");
        assert_eq!(r.k0_u.canonical(), "Z^2");
        assert_eq!(r.k0_a.unwrap().canonical(), "Z^5");
        assert_eq!(r.k1_a.unwrap().canonical(), "Z^4");
    }

    #[test]
    fn morse_k_groups() {
        let r = report_for(&["a", "b"], &["ab", "ba"]);
        assert_eq!(r.k0_u.canonical(), "Z + Z[1/2]");
        assert_eq!(r.k1_u.canonical(), "Z");
        assert_eq!(r.k0_a.unwrap().canonical(), "Z^2 + Z[1/2]^3");
        assert_eq!(r.k1_a.unwrap().canonical(), "Z^2 + Z[1/2]^2");
    }

    #[test]
    fn pathologic_k_a_not_computable() {
        let r = report_for(&["a", "b"], &["babbaaa", "abbbbb"]);
        assert!(r.k0_a.is_none());
        assert!(r.k1_a.is_none());
        assert!(r.notes.iter().any(|n| n.contains("residual")));
        assert_eq!(r.k0_s.free_rank, 1);
        assert_eq!(r.k0_s.residual.len(), 1);
    }

    #[test]
    fn torsion_placement_on_the_line() {
        let r = report_for(&["a", "b"], &["ab", "a"]);
        let d = torsion_placement_check(&r);
        assert!(d.ok(), "{:?}", d.failed);
    }

    #[test]
    fn kunneth_refuses_torsion_in_dim_2() {
        let mut notes = Vec::new();
        let torsion = GroupExpression::torsion_group(vec![BigInt::from(2)])
            .direct_sum(&GroupExpression::free(1));
        let ks = (torsion.clone(), GroupExpression::free(1));
        let ku = (GroupExpression::free(1), GroupExpression::free(1));
        let (k0, k1) = k_asymptotic(&ks, &ku, 2, &mut notes);
        assert!(k0.is_none() && k1.is_none());
        assert!(notes.iter().any(|n| n.contains("Kunneth")));
    }
}
