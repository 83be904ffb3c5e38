//! The Chow ring of LG(n,2n), with Schubert classes σ_λ indexed by strict partitions
//! λ ⊆ (n, n−1, …, 1) and σ_r = c_r(ℒ^∨) the one-row classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Strictly decreasing positive parts.
pub type StrictPartition = Vec<u8>;

pub fn lg_dimension(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Integer combination of Schubert classes of LG(n,2n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowClassLG {
    n: usize,
    coeffs: BTreeMap<StrictPartition, BigInt>,
}

impl ChowClassLG {
    pub fn zero(n: usize) -> Self {
        ChowClassLG { n, coeffs: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        ChowClassLG::sigma(n, &[]).expect("empty partition")
    }

    pub fn sigma(n: usize, parts: &[u8]) -> Result<Self> {
        let strict = parts.windows(2).all(|w| w[0] > w[1]);
        if !strict || parts.iter().any(|&p| p == 0 || p as usize > n) {
            return Err(Error::OutOfRange(format!("{parts:?} is not a strict partition with parts ≤ {n}")));
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(parts.to_vec(), BigInt::one());
        Ok(ChowClassLG { n, coeffs })
    }

    /// c_r(ℒ^∨); zero for r > n and the unit for r = 0.
    pub fn special(n: usize, r: usize) -> Self {
        match r {
            0 => ChowClassLG::one(n),
            r if r > n => ChowClassLG::zero(n),
            r => ChowClassLG::sigma(n, &[r as u8]).expect("one-row class"),
        }
    }

    /// The point class σ_{(n, n−1, …, 1)}.
    pub fn point(n: usize) -> Self {
        let parts: Vec<u8> = (1..=n as u8).rev().collect();
        ChowClassLG::sigma(n, &parts).expect("staircase")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, parts: &[u8]) -> BigInt {
        self.coeffs.get(parts).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&StrictPartition, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, parts: StrictPartition, c: BigInt) {
        let entry = self.coeffs.entry(parts).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("LG({0},{1}) vs LG({2},{3})", self.n, 2 * self.n, other.n, 2 * other.n)))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.insert(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        let mut out = ChowClassLG::zero(self.n);
        if !factor.is_zero() {
            for (p, c) in &self.coeffs {
                out.coeffs.insert(p.clone(), c * factor);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    /// Multiplication by c_r(ℒ^∨) through the Pieri rule.
    pub fn times_special(&self, r: usize) -> Self {
        if r == 0 {
            return self.clone();
        }
        let mut out = ChowClassLG::zero(self.n);
        if r > self.n {
            return out;
        }
        for (lambda, c) in &self.coeffs {
            for (mu, weight) in pieri_terms(self.n, lambda, r) {
                out.insert(mu, c * BigInt::from(weight));
            }
        }
        out
    }

    pub fn times_special_power(&self, r: usize, exponent: usize) -> Self {
        (0..exponent).fold(self.clone(), |acc, _| acc.times_special(r))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        lg_mult(self, other)
    }

    /// Coefficient of the point class.
    pub fn top_coefficient(&self) -> BigInt {
        self.coeff(&(1..=self.n as u8).rev().collect::<Vec<_>>())
    }

    /// Σ c_λ deg(σ_λ · c_1^{N−|λ|}).
    pub fn degree(&self) -> BigInt {
        let top = lg_dimension(self.n);
        self.coeffs
            .iter()
            .map(|(p, c)| {
                let weight: usize = p.iter().map(|&x| x as usize).sum();
                let single = ChowClassLG { n: self.n, coeffs: BTreeMap::from([(p.clone(), BigInt::one())]) };
                c * single.times_special_power(1, top - weight).top_coefficient()
            })
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let terms: serde_json::Map<String, Value> =
            self.coeffs.iter().map(|(p, c)| (format!("{p:?}"), Value::String(c.to_string()))).collect();
        json!({"n": self.n, "terms": terms})
    }
}

impl fmt::Display for ChowClassLG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.coeffs.iter().map(|(p, c)| format!("{c}·σ{p:?}")).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// σ_λ · σ_r = Σ 2^{N(λ,μ)} σ_μ over strict μ ⊇ λ with μ/λ a horizontal strip of size r,
/// where N counts the connected components of the shifted skew diagram that avoid the diagonal.
pub fn pieri_terms(n: usize, lambda: &[u8], r: usize) -> Vec<(StrictPartition, u64)> {
    let mut out = Vec::new();
    let mut mu = Vec::with_capacity(lambda.len() + 1);
    interlace(n, lambda, r, 0, &mut mu, &mut out);
    out
}

fn interlace(n: usize, lambda: &[u8], remaining: usize, row: usize, mu: &mut Vec<u8>, out: &mut Vec<(StrictPartition, u64)>) {
    if row > lambda.len() {
        if remaining == 0 {
            let parts: Vec<u8> = mu.iter().copied().filter(|&x| x > 0).collect();
            out.push((parts.clone(), 1u64 << free_components(lambda, &parts)));
        }
        return;
    }
    let low = lambda.get(row).copied().unwrap_or(0) as usize;
    let high = if row == 0 { n } else { lambda[row - 1] as usize };
    for value in low..=high.min(low + remaining) {
        // Strictness, ignoring trailing zeros.
        if row > 0 && value > 0 && value >= mu[row - 1] as usize {
            continue;
        }
        mu.push(value as u8);
        interlace(n, lambda, remaining - (value - low), row + 1, mu, out);
        mu.pop();
    }
}

fn free_components(lambda: &[u8], mu: &[u8]) -> u32 {
    let cells: Vec<(usize, usize)> = (0..mu.len())
        .flat_map(|i| {
            let start = i + lambda.get(i).copied().unwrap_or(0) as usize;
            (start..i + mu[i] as usize).map(move |c| (i, c))
        })
        .collect();
    let mut seen = vec![false; cells.len()];
    let mut count = 0;
    for start in 0..cells.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut touches_diagonal = false;
        while let Some(k) = stack.pop() {
            let (r, c) = cells[k];
            touches_diagonal |= r == c;
            for (j, &(r2, c2)) in cells.iter().enumerate() {
                if !seen[j] && r.abs_diff(r2) + c.abs_diff(c2) == 1 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if !touches_diagonal {
            count += 1;
        }
    }
    count
}

/// Giambelli: σ_λ as an integer polynomial in the special classes, as (coefficient, factors).
pub fn giambelli(n: usize, lambda: &[u8]) -> Vec<(BigInt, Vec<usize>)> {
    let mut memo = HashMap::new();
    let mut terms = giambelli_memo(n, lambda, &mut memo);
    terms.retain(|(c, f)| !c.is_zero() && f.iter().all(|&r| r <= n));
    terms
}

fn giambelli_memo(n: usize, lambda: &[u8], memo: &mut HashMap<Vec<u8>, Vec<(BigInt, Vec<usize>)>>) -> Vec<(BigInt, Vec<usize>)> {
    if let Some(hit) = memo.get(lambda) {
        return hit.clone();
    }
    let parts: Vec<usize> = lambda.iter().map(|&x| x as usize).filter(|&x| x > 0).collect();
    let result = match parts.len() {
        0 => vec![(BigInt::one(), vec![])],
        1 => vec![(BigInt::one(), vec![parts[0]])],
        2 => two_row(parts[0], parts[1]),
        _ => {
            // Pfaffian expansion along the first row, padding to even length with a zero part.
            let mut padded: Vec<usize> = parts.clone();
            if padded.len() % 2 == 1 {
                padded.push(0);
            }
            let mut out = Vec::new();
            for j in 1..padded.len() {
                let sign = if j % 2 == 1 { BigInt::one() } else { -BigInt::one() };
                let pair = if padded[j] == 0 { vec![(BigInt::one(), vec![padded[0]])] } else { two_row(padded[0], padded[j]) };
                let rest: Vec<u8> =
                    padded.iter().enumerate().filter(|&(k, &v)| k != 0 && k != j && v > 0).map(|(_, &v)| v as u8).collect();
                for (c1, f1) in &pair {
                    for (c2, f2) in giambelli_memo(n, &rest, memo) {
                        let mut factors = f1.clone();
                        factors.extend(f2);
                        out.push((&sign * c1 * c2, factors));
                    }
                }
            }
            out
        }
    };
    memo.insert(lambda.to_vec(), result.clone());
    result
}

/// σ_{r,s} = σ_r σ_s + 2 Σ_{k=1}^{s} (−1)^k σ_{r+k} σ_{s−k}, with σ_0 = 1.
fn two_row(r: usize, s: usize) -> Vec<(BigInt, Vec<usize>)> {
    let mut out = vec![(BigInt::one(), vec![r, s])];
    for k in 1..=s {
        let c = BigInt::from(if k % 2 == 1 { -2 } else { 2 });
        let factors = if s == k { vec![r + k] } else { vec![r + k, s - k] };
        out.push((c, factors));
    }
    out
}

/// Product in H*(LG(n,2n)): y is expanded by Giambelli and applied to x by repeated Pieri steps.
pub fn lg_mult(x: &ChowClassLG, y: &ChowClassLG) -> Result<ChowClassLG> {
    x.check_same(y)?;
    let mut out = ChowClassLG::zero(x.n);
    for (mu, c) in &y.coeffs {
        for (g, factors) in giambelli(x.n, mu) {
            let term = factors.iter().fold(x.clone(), |acc, &r| acc.times_special(r));
            out = out.add(&term.scale(&(c * g)))?;
        }
    }
    Ok(out)
}

pub const EXCEPTIONAL_N: usize = 10;

#[derive(Clone, Debug)]
pub struct ExceptionalReport {
    pub n: usize,
    /// deg(c_1^{N−4} · c_1² c_2).
    pub x: BigInt,
    /// deg(c_1^{N−4} · c_1 c_3).
    pub y: BigInt,
    /// deg(c_1^{N−4} · c_4).
    pub z: BigInt,
    pub b: BigInt,
    /// deg(c_1^{N−4} · σ_{n−2,n}) = Y − 2Z, with σ_{n−2,n} = c_1c_3 − 2c_4.
    pub sigma_factor_degree: BigInt,
    /// X − 4Z: the equation at b = 2.
    pub residual_at_plus_two: BigInt,
    pub c1_squared_is_2c2: bool,
    pub c2_squared_relation: bool,
}

impl ExceptionalReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "X": self.x.to_string(),
            "Y": self.y.to_string(),
            "Z": self.z.to_string(),
            "b": i64::try_from(&self.b).ok(),
            "sigma_factor_degree": self.sigma_factor_degree.to_string(),
            "residual_at_b_equal_2": self.residual_at_plus_two.to_string(),
            "c1_squared_is_2c2": self.c1_squared_is_2c2,
            "c2_squared_relation": self.c2_squared_relation,
        })
    }
}

/// Solves X + (b − 2)Y − 2bZ = 0 in H*(LG(n,2n)) for the coefficient b.
pub fn exceptional_coefficient_for(n: usize) -> Result<ExceptionalReport> {
    if n < 4 {
        return Err(Error::OutOfRange(format!("c_4 vanishes on LG({n},{})", 2 * n)));
    }
    let base = ChowClassLG::one(n).times_special_power(1, lg_dimension(n) - 4);
    let x = base.times_special(1).times_special(1).times_special(2).top_coefficient();
    let y = base.times_special(1).times_special(3).top_coefficient();
    let z = base.times_special(4).top_coefficient();
    let sigma_factor_degree = &y - BigInt::from(2) * &z;
    if sigma_factor_degree.is_zero() {
        return Err(Error::Degenerate("Y − 2Z = 0, b is not determined".into()));
    }
    let b = BigRational::new(BigInt::from(2) * &y - &x, sigma_factor_degree.clone());
    if !b.is_integer() {
        return Err(Error::Inconsistent(format!("non-integral coefficient b = {b}")));
    }
    let b = b.to_integer();
    let residual_at_plus_two = &x - BigInt::from(4) * &z;

    let c = |r| ChowClassLG::special(n, r);
    let c1_squared_is_2c2 = c(1).mul(&c(1))? == c(2).scale(&BigInt::from(2));
    let c2_squared = c(2).mul(&c(2))?;
    let rhs = c(3).mul(&c(1))?.sub(&c(4))?.scale(&BigInt::from(2));
    let c2_squared_relation = c2_squared == rhs;
    Ok(ExceptionalReport { n, x, y, z, b, sigma_factor_degree, residual_at_plus_two, c1_squared_is_2c2, c2_squared_relation })
}

pub fn exceptional_coefficient() -> Result<ExceptionalReport> {
    exceptional_coefficient_for(EXCEPTIONAL_N)
}

/// Degree of LG(n,2n) in its Plücker embedding, 2^{n(n−1)/2} N! Π (i−1)!/(2i−1)!.
pub fn lg_degree_formula(n: usize) -> BigInt {
    let factorial = |k: usize| (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let mut numer = BigInt::from(2).pow((n * n.saturating_sub(1) / 2) as u32) * factorial(lg_dimension(n));
    let mut denom = BigInt::one();
    for i in 1..=n {
        numer *= factorial(i - 1);
        denom *= factorial(2 * i - 1);
    }
    let q = &numer / &denom;
    debug_assert!((numer % denom).is_zero() && q.is_positive());
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strict_partitions(n: usize) -> Vec<StrictPartition> {
        (0u32..1 << n)
            .map(|mask| (1..=n as u8).rev().filter(|&p| mask & (1 << (p - 1)) != 0).collect())
            .collect()
    }

    #[test]
    fn lg24_by_hand() {
        let one = ChowClassLG::one(2);
        let h2 = one.times_special(1).times_special(1);
        assert_eq!(h2, ChowClassLG::special(2, 2).scale(&BigInt::from(2)));
        assert_eq!(h2.times_special(1), ChowClassLG::point(2).scale(&BigInt::from(2)));
        assert_eq!(one.degree(), BigInt::from(2));
    }

    #[test]
    fn degrees_match_closed_form() {
        let expected = [1, 2, 16, 768, 292864];
        for (i, &d) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(lg_degree_formula(n), BigInt::from(d));
            assert_eq!(ChowClassLG::one(n).degree(), BigInt::from(d), "n = {n}");
        }
        assert_eq!(ChowClassLG::one(6).degree(), lg_degree_formula(6));
    }

    #[test]
    fn giambelli_reproduces_every_basis_class() {
        for n in 1..=5 {
            for lambda in strict_partitions(n) {
                let built = lg_mult(&ChowClassLG::one(n), &ChowClassLG::sigma(n, &lambda).unwrap()).unwrap();
                assert_eq!(built, ChowClassLG::sigma(n, &lambda).unwrap(), "n = {n}, λ = {lambda:?}");
            }
        }
    }

    #[test]
    fn poincare_duality() {
        for n in 2..=4 {
            let parts = strict_partitions(n);
            for lambda in &parts {
                let complement: Vec<u8> = (1..=n as u8).rev().filter(|p| !lambda.contains(p)).collect();
                for mu in &parts {
                    let product = lg_mult(&ChowClassLG::sigma(n, lambda).unwrap(), &ChowClassLG::sigma(n, mu).unwrap()).unwrap();
                    let weight = |p: &[u8]| p.iter().map(|&x| x as usize).sum::<usize>();
                    if weight(lambda) + weight(mu) == lg_dimension(n) {
                        let expect = if *mu == complement { 1 } else { 0 };
                        assert_eq!(product.top_coefficient(), BigInt::from(expect));
                    }
                }
            }
        }
    }

    #[test]
    fn tautological_relations() {
        for n in 2..=6 {
            let c = |r| ChowClassLG::special(n, r);
            assert_eq!(c(1).mul(&c(1)).unwrap(), c(2).scale(&BigInt::from(2)));
            let lhs = c(2).mul(&c(2)).unwrap();
            let rhs = c(3).mul(&c(1)).unwrap().sub(&c(4)).unwrap().scale(&BigInt::from(2));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn degree_four_two_row_class() {
        // σ_{3,1} = c_3 c_1 − 2 c_4, the class whose degree divides out of the b equation.
        let n = 4;
        let c = |r| ChowClassLG::special(n, r);
        let rhs = c(3).mul(&c(1)).unwrap().sub(&c(4).scale(&BigInt::from(2))).unwrap();
        assert_eq!(ChowClassLG::sigma(n, &[3, 1]).unwrap(), rhs);
    }

    #[test]
    fn exceptional_coefficient_is_minus_two() {
        let report = exceptional_coefficient().unwrap();
        assert_eq!(report.b, BigInt::from(-2));
        assert!(report.sigma_factor_degree.is_positive());
        assert!(!report.residual_at_plus_two.is_zero());
        // The b = −2 equation, X − 4Y + 4Z = 0, holds exactly.
        assert!((&report.x - BigInt::from(4) * &report.y + BigInt::from(4) * &report.z).is_zero());
        assert!(report.c1_squared_is_2c2 && report.c2_squared_relation);
    }

    #[test]
    fn relations_as_degree_pairings() {
        // c_1² = 2c_2 paired with c_1^{N−2} on LG(2,4), and c_2² = 2(c_3c_1 − c_4) with c_1^{N−4} on LG(10,20).
        let one = ChowClassLG::one(2);
        assert_eq!(one.times_special(1).times_special(1).degree(), one.times_special(2).degree() * BigInt::from(2));
        let n = EXCEPTIONAL_N;
        let base = ChowClassLG::one(n).times_special_power(1, lg_dimension(n) - 4);
        let lhs = base.times_special(2).times_special(2).top_coefficient();
        let rhs = (base.times_special(3).times_special(1).top_coefficient() - base.times_special(4).top_coefficient()) * BigInt::from(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatched_ranks_are_rejected() {
        assert!(lg_mult(&ChowClassLG::one(2), &ChowClassLG::one(3)).is_err());
        assert!(ChowClassLG::sigma(3, &[2, 2]).is_err());
        assert!(ChowClassLG::sigma(3, &[4]).is_err());
    }

    fn random_class(n: usize, seeds: &[(usize, i64)]) -> ChowClassLG {
        let parts = strict_partitions(n);
        let mut out = ChowClassLG::zero(n);
        for &(i, c) in seeds {
            out = out.add(&ChowClassLG::sigma(n, &parts[i % parts.len()]).unwrap().scale(&BigInt::from(c))).unwrap();
        }
        out
    }

    /// Structure constants from Pieri alone. σ_{μ1}σ_{μ2}⋯ = a σ_μ + (classes lexicographically
    /// above μ), so processing μ in decreasing order gives σ_λ σ_μ by exact division.
    fn structure_table(n: usize) -> BTreeMap<(StrictPartition, StrictPartition), ChowClassLG> {
        let mut sorted = strict_partitions(n);
        sorted.sort_by(|a, b| b.cmp(a));
        let mut table: BTreeMap<(StrictPartition, StrictPartition), ChowClassLG> = BTreeMap::new();
        for mu in &sorted {
            let monomial = mu.iter().fold(ChowClassLG::one(n), |acc, &r| acc.times_special(r as usize));
            let lead = monomial.coeff(mu);
            for lambda in &sorted {
                let mut acc = mu.iter().fold(ChowClassLG::sigma(n, lambda).unwrap(), |acc, &r| acc.times_special(r as usize));
                for (nu, c) in monomial.terms() {
                    if nu != mu {
                        assert!(nu > mu);
                        acc = acc.sub(&table[&(lambda.clone(), nu.clone())].scale(c)).unwrap();
                    }
                }
                let mut exact = ChowClassLG::zero(n);
                for (p, c) in acc.terms() {
                    assert!((c % &lead).is_zero());
                    exact.insert(p.clone(), c / &lead);
                }
                table.insert((lambda.clone(), mu.clone()), exact);
            }
        }
        table
    }

    fn multiply_by_table(table: &BTreeMap<(StrictPartition, StrictPartition), ChowClassLG>, x: &ChowClassLG, y: &ChowClassLG) -> ChowClassLG {
        let mut out = ChowClassLG::zero(x.n());
        for (l, a) in x.terms() {
            for (m, b) in y.terms() {
                out = out.add(&table[&(l.clone(), m.clone())].scale(&(a * b))).unwrap();
            }
        }
        out
    }

    #[test]
    fn giambelli_product_matches_pieri_table() {
        for n in 2..=4 {
            let table = structure_table(n);
            for ((l, m), v) in &table {
                let direct = lg_mult(&ChowClassLG::sigma(n, l).unwrap(), &ChowClassLG::sigma(n, m).unwrap()).unwrap();
                assert_eq!(&direct, v, "n = {n}, {l:?}·{m:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn multiplication_is_commutative_and_associative(
            n in 2usize..=4,
            a in prop::collection::vec((0usize..16, -3i64..4), 1..3),
            b in prop::collection::vec((0usize..16, -3i64..4), 1..3),
            c in prop::collection::vec((0usize..16, -3i64..4), 1..3),
        ) {
            let table = structure_table(n);
            let (x, y, z) = (random_class(n, &a), random_class(n, &b), random_class(n, &c));
            let xy = lg_mult(&x, &y).unwrap();
            prop_assert_eq!(&xy, &multiply_by_table(&table, &x, &y));
            prop_assert_eq!(&xy, &lg_mult(&y, &x).unwrap());
            prop_assert_eq!(
                multiply_by_table(&table, &xy, &z),
                multiply_by_table(&table, &x, &multiply_by_table(&table, &y, &z))
            );
        }
    }
}
