//! Integer bookkeeping: the dimension counts for incidence loci in LG(10, ∧³W), and the
//! Beauville–Bogomolov and Fujiki arithmetic on the Hilbert cube S^[3] of a K3 surface.

use serde_json::{json, Value};

/// dim LG(10, 20).
pub const LG_DIMENSION: i64 = 55;
/// Upper bound for the family dimension plus fiber dimension in every case.
pub const LEDGER_BOUND: i64 = 53;

/// One case of the ledger: the family F_{i,d} of dimension `family`, and a fiber of dimension `fiber`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRow {
    pub i: u8,
    pub d: i64,
    pub family: i64,
    pub fiber: i64,
}

impl LedgerRow {
    pub fn total(&self) -> i64 {
        self.family + self.fiber
    }

    pub fn within_bound(&self) -> bool {
        self.total() <= LEDGER_BOUND
    }
}

/// dim G(3,6) + dim of the choices of [w] + dim of the W_4 ⊂ T_U meeting the fixed space
/// T_U ∩ F_[w] in dimension d + dim of the W_3 ⊂ W_4^⊥ ∩ F_[w] containing that d-space.
/// Kept term by term so the closed forms are checked rather than assumed.
fn family_dimension(i: u8, d: i64) -> i64 {
    // (dim of the [w] choices, dim T_U ∩ F_[w])
    let (point_choices, meet) = if i == 1 { (5, 3) } else { (2, 7) };
    let four_spaces = d * (meet - d) + (4 - d) * 6;
    let three_spaces = (3 - d) * (3 + d);
    9 + point_choices + four_spaces + three_spaces
}

pub fn closed_form(i: u8, d: i64) -> i64 {
    match i {
        1 => 47 - 3 * d - 2 * d * d,
        _ => 44 + d - 2 * d * d,
    }
}

pub fn fiber_dimension(d: i64) -> i64 {
    (3 + d) * (4 + d) / 2
}

/// Rows for i ∈ {1, 2} and d = 0..=3.
pub fn dimension_ledger() -> Vec<LedgerRow> {
    let mut rows = Vec::new();
    for i in [1u8, 2] {
        for d in 0..=3 {
            rows.push(LedgerRow { i, d, family: family_dimension(i, d), fiber: fiber_dimension(d) });
        }
    }
    rows
}

/// dim Ξ for Ξ = {(U, A) : dim(T_U ∩ A) ≥ 4}: dim G(3,6), then a 4-space in T_U (dim G(4,10)),
/// then a Lagrangian containing it (dim LG(6,12)).
pub fn xi_dimension() -> i64 {
    let grassmannian = |k: i64, n: i64| k * (n - k);
    grassmannian(3, 6) + grassmannian(4, 10) + 6 * 7 / 2
}

pub fn ledger_json() -> Value {
    let rows: Vec<Value> = dimension_ledger()
        .iter()
        .map(|r| {
            json!({
                "i": r.i, "d": r.d, "family": r.family, "closed_form": closed_form(r.i, r.d),
                "fiber": r.fiber, "total": r.total(), "within_53": r.within_bound(),
            })
        })
        .collect();
    json!({"rows": rows, "xi_dimension": xi_dimension(), "lg_dimension": LG_DIMENSION, "xi_below_lg": xi_dimension() < LG_DIMENSION})
}

/// The class aH − bδ on S^[3], with q(H) = 2g − 2, q(δ) = −4, q(H, δ) = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbInvariants {
    pub genus: i64,
    pub a: i64,
    pub b: i64,
    pub q: i64,
    /// (aH − bδ)⁶ = 15 q³.
    pub fujiki_degree: i64,
}

impl HilbInvariants {
    pub fn to_json(&self) -> Value {
        json!({"g": self.genus, "a": self.a, "b": self.b, "q": self.q, "fujiki_degree": self.fujiki_degree})
    }
}

pub const FUJIKI_CONSTANT_K3_3: i64 = 15;

pub fn hilb3_invariants(genus: i64, a: i64, b: i64) -> HilbInvariants {
    let q = a * a * (2 * genus - 2) - 4 * b * b;
    HilbInvariants { genus, a, b, q, fujiki_degree: FUJIKI_CONSTANT_K3_3 * q * q * q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ledger_matches_closed_forms_and_bound() {
        let rows = dimension_ledger();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            assert_eq!(r.family, closed_form(r.i, r.d), "{r:?}");
            assert!(r.within_bound(), "{r:?}");
        }
        assert_eq!(rows[0], LedgerRow { i: 1, d: 0, family: 47, fiber: 6 });
        assert_eq!(rows[0].total(), 53);
        let last = rows.last().unwrap();
        assert_eq!((last.family, last.fiber, last.total()), (29, 21, 50));
        assert_eq!(xi_dimension(), 54);
        assert!(xi_dimension() < LG_DIMENSION);
    }

    #[test]
    fn hilbert_scheme_lattice() {
        let x = hilb3_invariants(6, 2, 3);
        assert_eq!((x.q, x.fujiki_degree), (4, 960));
        assert_eq!(hilb3_invariants(6, 1, 0).q, 10);
    }

    proptest! {
        #[test]
        fn fujiki_is_fifteen_q_cubed(g in 2i64..30, a in -20i64..20, b in -20i64..20) {
            let x = hilb3_invariants(g, a, b);
            prop_assert_eq!(x.q, hilb3_invariants(g, -a, b).q);
            prop_assert_eq!(x.q, hilb3_invariants(g, a, -b).q);
            prop_assert_eq!(x.fujiki_degree, 15 * x.q.pow(3));
        }
    }
}
