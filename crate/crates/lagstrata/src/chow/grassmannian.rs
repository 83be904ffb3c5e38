//! The Chow ring of G(3,6): Schubert classes σ_λ for λ in the 3×3 box, with
//! σ_i = c_i(Q) and σ_{1^i} = c_i(S^∨) for the tautological sequence 0 → S → W → Q → 0.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{kernel, solve};
use crate::scalar::Rational;

/// Weakly decreasing parts, each at most 3.
pub type Partition = [u8; 3];

pub const POINT: Partition = [3, 3, 3];
pub const GRASSMANNIAN_DIM: usize = 9;

fn size(p: &Partition) -> usize {
    p.iter().map(|&x| x as usize).sum()
}

/// All 20 partitions in the box, by size and then reverse lexicographically.
pub fn box_partitions() -> &'static [Partition] {
    static LIST: OnceLock<Vec<Partition>> = OnceLock::new();
    LIST.get_or_init(|| {
        let mut out = Vec::new();
        for a in 0..=3u8 {
            for b in 0..=a {
                for c in 0..=b {
                    out.push([a, b, c]);
                }
            }
        }
        out.sort_by(|x, y| size(x).cmp(&size(y)).then(y.cmp(x)));
        out
    })
}

fn index_of(p: &Partition) -> usize {
    box_partitions().iter().position(|q| q == p).expect("partition in the 3×3 box")
}

/// Littlewood–Richardson coefficient c^ν_{λμ}: LR fillings of ν/λ with content μ.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if (0..3).any(|r| lambda[r] > nu[r]) || size(nu) != size(lambda) + size(mu) {
        return 0;
    }
    // Reading order: rows top to bottom, each right to left.
    let cells: Vec<(usize, usize)> =
        (0..3).flat_map(|r| (lambda[r] as usize..nu[r] as usize).rev().map(move |c| (r, c))).collect();
    let mut grid = [[0u8; 3]; 3];
    let mut counts = [0u8; 3];
    fn fill(
        at: usize,
        cells: &[(usize, usize)],
        lambda: &Partition,
        nu: &Partition,
        mu: &Partition,
        grid: &mut [[u8; 3]; 3],
        counts: &mut [u8; 3],
    ) -> u64 {
        let Some(&(r, c)) = cells.get(at) else { return 1 };
        let mut total = 0;
        for v in 1..=3u8 {
            let slot = (v - 1) as usize;
            if counts[slot] == mu[slot] || (slot > 0 && counts[slot] == counts[slot - 1]) {
                continue;
            }
            if c + 1 < nu[r] as usize && v > grid[r][c + 1] {
                continue;
            }
            if r > 0 && c >= lambda[r - 1] as usize && v <= grid[r - 1][c] {
                continue;
            }
            grid[r][c] = v;
            counts[slot] += 1;
            total += fill(at + 1, cells, lambda, nu, mu, grid, counts);
            counts[slot] -= 1;
            grid[r][c] = 0;
        }
        total
    }
    fill(0, &cells, lambda, nu, mu, &mut grid, &mut counts)
}

/// products[i][j] = [(k, c)] with σ_i σ_j = Σ c σ_k, over box indices.
fn structure_constants() -> &'static Vec<Vec<Vec<(usize, i64)>>> {
    static TABLE: OnceLock<Vec<Vec<Vec<(usize, i64)>>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let parts = box_partitions();
        parts
            .iter()
            .map(|l| {
                parts
                    .iter()
                    .map(|m| {
                        parts
                            .iter()
                            .enumerate()
                            .filter_map(|(k, n)| {
                                let c = lr_coefficient(l, m, n);
                                (c > 0).then_some((k, c as i64))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    })
}

trait Coefficient: Clone + Zero + Add<Output = Self> + Mul<Output = Self> {
    fn integer(v: i64) -> Self;
}

impl Coefficient for i64 {
    fn integer(v: i64) -> Self {
        v
    }
}

impl Coefficient for BigRational {
    fn integer(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

fn multiply_dense<T: Coefficient>(x: &[T], y: &[T]) -> Vec<T> {
    let table = structure_constants();
    let mut out = vec![T::zero(); x.len()];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let ab = a.clone() * b.clone();
            for &(k, c) in &table[i][j] {
                out[k] = out[k].clone() + ab.clone() * T::integer(c);
            }
        }
    }
    out
}

/// Integer combination of Schubert classes of G(3,6).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChowClassG36 {
    coeffs: BTreeMap<Partition, i64>,
}

impl ChowClassG36 {
    pub fn zero() -> Self {
        ChowClassG36::default()
    }

    pub fn one() -> Self {
        ChowClassG36::sigma([0, 0, 0])
    }

    pub fn sigma(p: Partition) -> Self {
        ChowClassG36::from_terms([(p, 1)])
    }

    /// The hyperplane class σ_1.
    pub fn h() -> Self {
        ChowClassG36::sigma([1, 0, 0])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Partition, i64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (p, c) in terms {
            assert!(p[0] <= 3 && p[0] >= p[1] && p[1] >= p[2], "{p:?} is not a partition in the 3×3 box");
            *coeffs.entry(p).or_insert(0) += c;
        }
        coeffs.retain(|_, c| *c != 0);
        ChowClassG36 { coeffs }
    }

    pub fn coeff(&self, p: &Partition) -> i64 {
        self.coeffs.get(p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &i64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn dense(&self) -> Vec<i64> {
        let mut v = vec![0; box_partitions().len()];
        for (p, &c) in &self.coeffs {
            v[index_of(p)] = c;
        }
        v
    }

    fn from_dense(v: &[i64]) -> Self {
        ChowClassG36::from_terms(box_partitions().iter().copied().zip(v.iter().copied()))
    }

    pub fn add(&self, other: &Self) -> Self {
        ChowClassG36::from_terms(self.coeffs.iter().chain(&other.coeffs).map(|(p, c)| (*p, *c)))
    }

    pub fn scale(&self, factor: i64) -> Self {
        ChowClassG36::from_terms(self.coeffs.iter().map(|(p, c)| (*p, c * factor)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        mult_g36(self, other)
    }

    pub fn pow(&self, exponent: usize) -> Self {
        (0..exponent).fold(ChowClassG36::one(), |acc, _| acc.mul(self))
    }

    /// Codimension of a homogeneous class; None for zero or mixed classes.
    pub fn codim(&self) -> Option<usize> {
        let mut sizes = self.coeffs.keys().map(size);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// Σ c_λ deg(σ_λ · h^{9−|λ|}): the degree of the cycle under the Plücker embedding.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .iter()
            .map(|(p, &c)| c * ChowClassG36::sigma(*p).mul(&ChowClassG36::h().pow(GRASSMANNIAN_DIM - size(p))).coeff(&POINT))
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.coeffs.iter().map(|(p, c)| (label(p), Value::from(*c))).collect())
    }
}

fn label(p: &Partition) -> String {
    let parts: Vec<String> = p.iter().filter(|&&x| x > 0).map(|x| x.to_string()).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        format!("s{}", parts.join(""))
    }
}

impl fmt::Display for ChowClassG36 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.coeffs.iter().rev().map(|(p, c)| format!("{c}·{}", label(p))).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

pub fn mult_g36(x: &ChowClassG36, y: &ChowClassG36) -> ChowClassG36 {
    ChowClassG36::from_dense(&multiply_dense(&x.dense(), &y.dense()))
}

type RationalClass = Vec<BigRational>;

fn rational_sigma(p: Partition, c: i64) -> RationalClass {
    let mut v = vec![BigRational::zero(); box_partitions().len()];
    v[index_of(&p)] = BigRational::integer(c);
    v
}

fn rational_add(x: &RationalClass, y: &RationalClass) -> RationalClass {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn rational_scale(x: &RationalClass, factor: &BigRational) -> RationalClass {
    x.iter().map(|a| a * factor).collect()
}

fn to_integral(x: &RationalClass) -> Result<ChowClassG36> {
    let mut dense = Vec::with_capacity(x.len());
    for c in x {
        if !c.is_integer() {
            return Err(Error::Inconsistent(format!("non-integral Chow coefficient {c}")));
        }
        dense.push(i64::try_from(c.to_integer()).map_err(|_| Error::Inconsistent("coefficient overflow".into()))?);
    }
    Ok(ChowClassG36::from_dense(&dense))
}

/// Power sums p_1..p_9 of the Chern roots, with p_0 = rank.
#[derive(Clone, Debug)]
struct PowerSums {
    rank: i64,
    sums: Vec<RationalClass>,
}

impl PowerSums {
    /// Newton's identities from c_1..c_r.
    fn from_chern(rank: i64, chern: &[RationalClass]) -> Self {
        let zero = rational_sigma([0, 0, 0], 0);
        let c = |i: usize| chern.get(i).cloned().unwrap_or_else(|| zero.clone());
        let mut sums: Vec<RationalClass> = vec![BigRational::integer(rank); 1].iter().map(|_| zero.clone()).collect();
        for k in 1..=GRASSMANNIAN_DIM {
            let mut pk = rational_scale(&c(k), &BigRational::integer(if k % 2 == 1 { k as i64 } else { -(k as i64) }));
            for i in 1..k {
                let sign = BigRational::integer(if i % 2 == 1 { 1 } else { -1 });
                pk = rational_add(&pk, &rational_scale(&multiply_dense(&c(i), &sums[k - i]), &sign));
            }
            sums.push(pk);
        }
        PowerSums { rank, sums }
    }

    fn get(&self, k: usize) -> RationalClass {
        if k == 0 {
            rational_sigma([0, 0, 0], self.rank)
        } else {
            self.sums[k].clone()
        }
    }

    fn line(h: &RationalClass) -> Self {
        let mut sums = vec![rational_sigma([0, 0, 0], 0)];
        let mut power = rational_sigma([0, 0, 0], 1);
        for _ in 1..=GRASSMANNIAN_DIM {
            power = multiply_dense(&power, h);
            sums.push(power.clone());
        }
        PowerSums { rank: 1, sums }
    }

    fn dual(&self) -> Self {
        let sums = self
            .sums
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 1 { rational_scale(s, &BigRational::integer(-1)) } else { s.clone() })
            .collect();
        PowerSums { rank: self.rank, sums }
    }

    /// Roots x_i + y_j: p_k = Σ_m C(k,m) p_m p_{k−m}.
    fn tensor(&self, other: &PowerSums) -> Self {
        let mut sums = vec![rational_sigma([0, 0, 0], 0)];
        for k in 1..=GRASSMANNIAN_DIM {
            let mut total = rational_sigma([0, 0, 0], 0);
            let mut binom = 1i64;
            for m in 0..=k {
                let term = multiply_dense(&self.get(m), &other.get(k - m));
                total = rational_add(&total, &rational_scale(&term, &BigRational::integer(binom)));
                binom = binom * (k - m) as i64 / (m + 1) as i64;
            }
            sums.push(total);
        }
        PowerSums { rank: self.rank * other.rank, sums }
    }

    /// c_0..c_{max_degree} from k c_k = Σ_{i=1}^{k} (−1)^{i−1} c_{k−i} p_i.
    fn chern(&self) -> Vec<RationalClass> {
        let mut c = vec![rational_sigma([0, 0, 0], 1)];
        for k in 1..=GRASSMANNIAN_DIM {
            let mut acc = rational_sigma([0, 0, 0], 0);
            for i in 1..=k {
                let sign = BigRational::integer(if i % 2 == 1 { 1 } else { -1 });
                acc = rational_add(&acc, &rational_scale(&multiply_dense(&c[k - i], &self.sums[i]), &sign));
            }
            c.push(rational_scale(&acc, &BigRational::new(BigInt::one(), BigInt::from(k))));
        }
        c
    }
}

/// c_0..c_10 of 𝒯^∨, from 0 → Ω(1) → 𝒯^∨ → 𝒪(1) → 0 and Ω = S ⊗ Q^∨.
pub fn chern_t_dual() -> Result<Vec<ChowClassG36>> {
    let quotient: Vec<RationalClass> = (0..=3).map(|i| rational_sigma([i, 0, 0], 1)).collect();
    let sub: Vec<RationalClass> = (0..=3u8)
        .map(|i| {
            let mut p = [0u8; 3];
            for slot in p.iter_mut().take(i as usize) {
                *slot = 1;
            }
            rational_sigma(p, if i % 2 == 0 { 1 } else { -1 })
        })
        .collect();
    let h = rational_sigma([1, 0, 0], 1);
    let omega = PowerSums::from_chern(3, &sub).tensor(&PowerSums::from_chern(3, &quotient).dual());
    let twisted = omega.tensor(&PowerSums::line(&h));
    let total_twisted = twisted.chern();
    let mut out = Vec::with_capacity(11);
    for k in 0..=10 {
        // c_k(𝒯^∨) = c_k(Ω(1)) + h·c_{k−1}(Ω(1)).
        let mut ck = total_twisted.get(k).cloned().unwrap_or_else(|| rational_sigma([0, 0, 0], 0));
        if k >= 1 {
            if let Some(prev) = total_twisted.get(k - 1) {
                ck = rational_add(&ck, &multiply_dense(prev, &h));
            }
        }
        out.push(to_integral(&ck)?);
    }
    Ok(out)
}

/// The degeneracy class of D_k: c1; c2c1 − 2c3; c1c2c3 − 2c1²c4 + 2c2c4 + 2c1c5 − 2c3².
pub fn pr_class(k: usize) -> Result<ChowClassG36> {
    let c = chern_t_dual()?;
    match k {
        1 => Ok(c[1].clone()),
        2 => Ok(c[2].mul(&c[1]).sub(&c[3].scale(2))),
        3 => Ok(c[1]
            .mul(&c[2])
            .mul(&c[3])
            .sub(&c[1].mul(&c[1]).mul(&c[4]).scale(2))
            .add(&c[2].mul(&c[4]).scale(2))
            .add(&c[1].mul(&c[5]).scale(2))
            .sub(&c[3].mul(&c[3]).scale(2))),
        _ => Err(Error::OutOfRange(format!("degeneracy index {k} outside 1..=3"))),
    }
}

/// How s_i relates to the tautological subbundle S.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConvention {
    /// s_i = c_i(S) = (−1)^i σ_{1^i}.
    Subbundle,
    /// s_i = c_i(S^∨) = σ_{1^i}.
    DualSubbundle,
}

/// The convention under which [D_2] = 16h³ − 12hs₂ + 12s₃.
pub const FROZEN_CONVENTION: SignConvention = SignConvention::DualSubbundle;

pub fn s_class(i: usize, convention: SignConvention) -> ChowClassG36 {
    let mut p = [0u8; 3];
    for slot in p.iter_mut().take(i.min(3)) {
        *slot = 1;
    }
    if i > 3 {
        return ChowClassG36::zero();
    }
    let sign = match convention {
        SignConvention::DualSubbundle => 1,
        SignConvention::Subbundle if i % 2 == 1 => -1,
        SignConvention::Subbundle => 1,
    };
    ChowClassG36::sigma(p).scale(sign)
}

/// (h³, h·s₂, s₃), a basis of A³ over ℚ.
pub fn codim3_basis(convention: SignConvention) -> [ChowClassG36; 3] {
    let h = ChowClassG36::h();
    [h.pow(3), h.mul(&s_class(2, convention)), s_class(3, convention)]
}

/// Coordinates of a codimension-3 class in the basis (h³, h·s₂, s₃), if integral.
pub fn decompose_codim3(x: &ChowClassG36, convention: SignConvention) -> Result<[i64; 3]> {
    let basis = codim3_basis(convention);
    let targets: Vec<Partition> = vec![[3, 0, 0], [2, 1, 0], [1, 1, 1]];
    if x.terms().any(|(p, _)| !targets.contains(p)) {
        return Err(Error::DimensionMismatch(format!("{x} is not of codimension 3")));
    }
    let rows: Vec<Vec<Rational>> =
        targets.iter().map(|p| basis.iter().map(|b| Rational::new(b.coeff(p), 1)).collect()).collect();
    let rhs: Vec<Rational> = targets.iter().map(|p| Rational::new(x.coeff(p), 1)).collect();
    let sol = solve((), &rows, &rhs, 3).ok_or_else(|| Error::Inconsistent("basis of A³ is singular".into()))?;
    let mut out = [0i64; 3];
    for (slot, value) in out.iter_mut().zip(&sol) {
        *slot = value.to_i64().ok_or_else(|| Error::Inconsistent(format!("non-integral coordinate {value}")))?;
    }
    Ok(out)
}

/// Quadratic polynomial in (a, b, c) over the monomials 1, a, b, c, a², ab, ac, b², bc, c².
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuadPoly(pub [i64; 10]);

const MONOMIALS: [&str; 10] = ["", "a", "b", "c", "a²", "ab", "ac", "b²", "bc", "c²"];

impl QuadPoly {
    /// The product of two affine-linear forms [const, a, b, c].
    fn product(x: [i64; 4], y: [i64; 4]) -> QuadPoly {
        let mut out = [0i64; 10];
        // Index of the monomial v_i v_j for variables 1..=3, with v_0 = 1.
        let slot = |i: usize, j: usize| -> usize {
            let (i, j) = (i.min(j), i.max(j));
            match (i, j) {
                (0, j) => j,
                (1, 1) => 4,
                (1, 2) => 5,
                (1, 3) => 6,
                (2, 2) => 7,
                (2, 3) => 8,
                (3, 3) => 9,
                _ => unreachable!(),
            }
        };
        for i in 0..4 {
            for j in 0..4 {
                out[slot(i, j)] += x[i] * y[j];
            }
        }
        QuadPoly(out)
    }

    pub fn evaluate(&self, a: i64, b: i64, c: i64) -> i128 {
        let v = [1, a, b, c, a * a, a * b, a * c, b * b, b * c, c * c];
        self.0.iter().zip(v).map(|(&k, m)| k as i128 * m as i128).sum()
    }

    pub fn scale(&self, factor: i64) -> QuadPoly {
        QuadPoly(self.0.map(|x| x * factor))
    }

    pub fn add(&self, other: &QuadPoly) -> QuadPoly {
        let mut out = self.0;
        for (x, y) in out.iter_mut().zip(other.0) {
            *x += y;
        }
        QuadPoly(out)
    }

    pub fn is_c_free(&self) -> bool {
        [3, 6, 8, 9].iter().all(|&i| self.0[i] == 0)
    }

    /// Divides by the gcd of the coefficients and makes the a² coefficient negative,
    /// or failing that the first nonzero one.
    pub fn primitive(&self) -> QuadPoly {
        let g = self.0.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        if g == 0 {
            return *self;
        }
        let mut out = self.0.map(|x| x / g);
        let lead = if out[4] != 0 { out[4] } else { out.iter().copied().find(|&x| x != 0).unwrap_or(0) };
        if lead > 0 {
            out = out.map(|x| -x);
        }
        QuadPoly(out)
    }

    pub fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl fmt::Display for QuadPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = [4, 5, 7, 6, 8, 9, 1, 2, 3, 0];
        let mut first = true;
        for &i in &order {
            let c = self.0[i];
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let coeff = if mag == 1 && !MONOMIALS[i].is_empty() { String::new() } else { mag.to_string() };
            if first {
                write!(f, "{sign}{coeff}{}", MONOMIALS[i])?;
            } else {
                write!(f, " {sign} {coeff}{}", MONOMIALS[i])?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " = 0")
    }
}

/// The three coefficients of (a h³ − b h s₂ + c s₃)·((16−a) h³ − (12−b) h s₂ + (12−c) s₃)
/// in the Schubert basis σ_33, σ_321, σ_222 of A⁶.
pub fn derived_connectedness_system(target: [i64; 3]) -> [QuadPoly; 3] {
    let basis = codim3_basis(FROZEN_CONVENTION);
    let left: [[i64; 4]; 3] = [[0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]];
    let right: [[i64; 4]; 3] = [[target[0], -1, 0, 0], [-target[1], 0, 1, 0], [target[2], 0, 0, -1]];
    let top: [Partition; 3] = [[3, 3, 0], [3, 2, 1], [2, 2, 2]];
    top.map(|nu| {
        let mut eq = QuadPoly::default();
        for u in 0..3 {
            for v in 0..3 {
                let k = basis[u].mul(&basis[v]).coeff(&nu);
                if k != 0 {
                    eq = eq.add(&QuadPoly::product(left[u], right[v]).scale(k));
                }
            }
        }
        eq
    })
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// A nonzero integer combination of the equations with no c terms.
pub fn c_free_combination(eqs: &[QuadPoly]) -> Result<QuadPoly> {
    let columns = [3usize, 6, 8, 9];
    let rows: Vec<Vec<Rational>> = columns.iter().map(|&m| eqs.iter().map(|e| Rational::new(e.0[m], 1)).collect()).collect();
    for combo in kernel((), &rows, eqs.len()) {
        let denom = combo.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.0.denom().clone()));
        let weights: Vec<i64> = combo
            .iter()
            .map(|x| i64::try_from((x.0.clone() * BigRational::from_integer(denom.clone())).to_integer()).expect("small weights"))
            .collect();
        let total = eqs.iter().zip(&weights).fold(QuadPoly::default(), |acc, (e, &w)| acc.add(&e.scale(w)));
        if total.0.iter().any(|&x| x != 0) {
            return Ok(total.primitive());
        }
    }
    Err(Error::Degenerate("no nonzero c-free combination".into()))
}

/// All integer solutions of a system of quadratic equations in (a, b, c), using a c-free
/// combination whose quadratic part in (a, b) is definite to bound the search.
pub fn solve_integer_system(eqs: &[QuadPoly]) -> Result<Vec<[i64; 3]>> {
    let bound = c_free_combination(eqs)?;
    let [zeta, delta, epsilon, _, alpha, beta, _, gamma, _, _] = bound.0.map(|x| x as i128);
    if beta * beta - 4 * alpha * gamma >= 0 {
        return Err(Error::Degenerate(format!("quadratic part of {bound} is not definite")));
    }
    // As a quadratic in b: γ b² + (β a + ε) b + (α a² + δ a + ζ).
    let discriminant = |a: i128| (beta * a + epsilon).pow(2) - 4 * gamma * (alpha * a * a + delta * a + zeta);
    let lead = beta * beta - 4 * alpha * gamma;
    let linear = 2 * beta * epsilon - 4 * gamma * delta;
    let vertex = (-linear as f64 / (2.0 * lead as f64)).round() as i128;
    let mut a_values = Vec::new();
    for start in [vertex - 1, vertex, vertex + 1] {
        if discriminant(start) >= 0 {
            let mut lo = start;
            while discriminant(lo - 1) >= 0 {
                lo -= 1;
            }
            let mut hi = start;
            while discriminant(hi + 1) >= 0 {
                hi += 1;
            }
            a_values = (lo..=hi).collect();
            break;
        }
    }
    let mut solutions = Vec::new();
    for a in a_values {
        let Some(root) = isqrt(discriminant(a)) else { continue };
        let mut bs = vec![-(beta * a + epsilon) + root, -(beta * a + epsilon) - root];
        bs.dedup();
        for numer in bs {
            if numer % (2 * gamma) != 0 {
                continue;
            }
            let b = numer / (2 * gamma);
            let (a64, b64) = (a as i64, b as i64);
            for c in c_candidates(eqs, a64, b64)? {
                if eqs.iter().all(|e| e.evaluate(a64, b64, c) == 0) {
                    solutions.push([a64, b64, c]);
                }
            }
        }
    }
    solutions.sort();
    solutions.dedup();
    Ok(solutions)
}

fn c_candidates(eqs: &[QuadPoly], a: i64, b: i64) -> Result<Vec<i64>> {
    for e in eqs {
        let q = &e.0;
        let (a, b) = (a as i128, b as i128);
        let c2 = q[9] as i128;
        let c1 = q[3] as i128 + q[6] as i128 * a + q[8] as i128 * b;
        let c0 = e.evaluate(a as i64, b as i64, 0);
        if c2 == 0 && c1 == 0 {
            continue;
        }
        if c2 == 0 {
            return Ok(if c0 % c1 == 0 { vec![(-c0 / c1) as i64] } else { vec![] });
        }
        let Some(root) = isqrt(c1 * c1 - 4 * c2 * c0) else { return Ok(vec![]) };
        return Ok([-c1 + root, -c1 - root].iter().filter(|&&n| n % (2 * c2) == 0).map(|&n| (n / (2 * c2)) as i64).collect());
    }
    if eqs.iter().all(|e| e.evaluate(a, b, 0) == 0) {
        return Err(Error::Inconsistent(format!("c is unconstrained at (a, b) = ({a}, {b})")));
    }
    Ok(vec![])
}

#[derive(Clone, Debug)]
pub struct ConnectednessReport {
    /// pr_class(2) in the basis (h³, h·s₂, s₃).
    pub decomposition: [i64; 3],
    pub system: [QuadPoly; 3],
    pub c_free: QuadPoly,
    pub solutions: Vec<[i64; 3]>,
}

impl ConnectednessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "decomposition": self.decomposition,
            "basis": ["h^3", "h*s2", "s3"],
            "sign_convention": "s_i = c_i(S^dual)",
            "degree6_basis": ["s33", "s321", "s222"],
            "system": self.system.iter().map(QuadPoly::to_json).collect::<Vec<_>>(),
            "c_free_combination": self.c_free.to_json(),
            "solutions": self.solutions,
        })
    }
}

/// Splittings [D_2] = X + Y into codimension-3 classes with X·Y = 0 in A⁶.
pub fn connectedness_check() -> Result<ConnectednessReport> {
    let decomposition = decompose_codim3(&pr_class(2)?, FROZEN_CONVENTION)?;
    // The ansatz writes the class as a h³ − b h s₂ + c s₃.
    let target = [decomposition[0], -decomposition[1], decomposition[2]];
    let system = derived_connectedness_system(target);
    let c_free = c_free_combination(&system)?;
    let solutions = solve_integer_system(&system)?;
    Ok(ConnectednessReport { decomposition, system, c_free, solutions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: [u8; 3]) -> ChowClassG36 {
        ChowClassG36::sigma(p)
    }

    #[test]
    fn pieri_and_truncation() {
        assert_eq!(s([1, 0, 0]).mul(&s([1, 0, 0])), ChowClassG36::from_terms([([2, 0, 0], 1), ([1, 1, 0], 1)]));
        assert!(s([3, 3, 3]).mul(&s([1, 0, 0])).is_zero());
        assert_eq!(ChowClassG36::h().pow(9).coeff(&POINT), 42);
        assert_eq!(ChowClassG36::one().degree(), 42);
    }

    /// Oracle: Jacobi–Trudi σ_λ = det(σ_{λ_i + j − i}) evaluated with the Pieri rule only.
    fn pieri(x: &ChowClassG36, r: u8) -> ChowClassG36 {
        let mut out = ChowClassG36::zero();
        for (lambda, &c) in x.terms() {
            for nu in box_partitions() {
                let strip = (0..3).all(|i| nu[i] >= lambda[i] && (i == 0 || nu[i] <= lambda[i - 1]));
                if strip && size(nu) == size(lambda) + r as usize {
                    out = out.add(&ChowClassG36::sigma(*nu).scale(c));
                }
            }
        }
        out
    }

    fn via_jacobi_trudi(x: &ChowClassG36, mu: Partition) -> ChowClassG36 {
        // det of the 3×3 matrix h_{μ_i + j − i}, expanded over permutations.
        let perms: [([usize; 3], i64); 6] =
            [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
        let mut out = ChowClassG36::zero();
        for (perm, sign) in perms {
            let mut term = x.clone();
            let mut dead = false;
            for i in 0..3 {
                let k = mu[i] as i64 + perm[i] as i64 - i as i64;
                if k < 0 || k > 3 {
                    dead = true;
                    break;
                }
                term = pieri(&term, k as u8);
            }
            if !dead {
                out = out.add(&term.scale(sign));
            }
        }
        out
    }

    #[test]
    fn littlewood_richardson_matches_jacobi_trudi() {
        for l in box_partitions() {
            for m in box_partitions() {
                assert_eq!(s(*l).mul(&s(*m)), via_jacobi_trudi(&s(*l), *m), "{l:?}·{m:?}");
            }
        }
    }

    #[test]
    fn ring_axioms() {
        let parts = box_partitions();
        for a in parts {
            assert_eq!(s(*a).mul(&ChowClassG36::one()), s(*a));
            for b in parts {
                assert_eq!(s(*a).mul(&s(*b)), s(*b).mul(&s(*a)));
                for c in parts.iter().step_by(3) {
                    assert_eq!(s(*a).mul(&s(*b)).mul(&s(*c)), s(*a).mul(&s(*b).mul(&s(*c))));
                }
            }
        }
    }

    #[test]
    fn poincare_duality_is_a_permutation() {
        let parts = box_partitions();
        for d in 0..=9 {
            let low: Vec<_> = parts.iter().filter(|p| size(p) == d).collect();
            let high: Vec<_> = parts.iter().filter(|p| size(p) == 9 - d).collect();
            for a in &low {
                let ones: Vec<i64> = high.iter().map(|b| s(**a).mul(&s(**b)).coeff(&POINT)).collect();
                assert_eq!(ones.iter().filter(|&&x| x == 1).count(), 1);
                assert_eq!(ones.iter().filter(|&&x| x != 0).count(), 1);
                let dual = [3 - a[2], 3 - a[1], 3 - a[0]];
                assert_eq!(s(**a).mul(&s(dual)).coeff(&POINT), 1);
            }
        }
    }

    #[test]
    fn chern_classes_of_cotangent_twist() {
        let c = chern_t_dual().unwrap();
        assert_eq!(c[0], ChowClassG36::one());
        assert_eq!(c[1], ChowClassG36::h().scale(4));
        assert!(c[10].is_zero());
        assert_eq!(c[1].degree(), 168);
    }

    #[test]
    fn degeneracy_degrees() {
        assert_eq!(pr_class(1).unwrap().degree(), 168);
        assert_eq!(pr_class(2).unwrap().degree(), 480);
        assert_eq!(pr_class(3).unwrap().degree(), 720);
        assert_eq!(pr_class(2).unwrap().codim(), Some(3));
        assert_eq!(pr_class(3).unwrap().codim(), Some(6));
        assert!(pr_class(4).is_err());
    }

    #[test]
    fn d2_decomposition_fixes_the_sign_convention() {
        let d2 = pr_class(2).unwrap();
        assert_eq!(decompose_codim3(&d2, SignConvention::DualSubbundle).unwrap(), [16, -12, 12]);
        assert_ne!(decompose_codim3(&d2, SignConvention::Subbundle).unwrap(), [16, -12, 12]);
        assert_eq!(d2, ChowClassG36::from_terms([([3, 0, 0], 16), ([2, 1, 0], 20), ([1, 1, 1], 16)]));
    }

    #[test]
    fn tensor_power_sums_agree_with_direct_chern_classes() {
        // c(Q ⊗ O(1)) for rank 3: c_1 = c_1(Q) + 3h = 4h.
        let h = rational_sigma([1, 0, 0], 1);
        let quotient: Vec<RationalClass> = (0..=3).map(|i| rational_sigma([i, 0, 0], 1)).collect();
        let twisted = PowerSums::from_chern(3, &quotient).tensor(&PowerSums::line(&h)).chern();
        assert_eq!(to_integral(&twisted[1]).unwrap(), ChowClassG36::h().scale(4));
        // Round trip through power sums.
        let back = PowerSums::from_chern(3, &quotient).chern();
        for i in 0..=3 {
            assert_eq!(to_integral(&back[i]).unwrap(), to_integral(&quotient[i]).unwrap());
        }
        assert!(to_integral(&back[4]).unwrap().is_zero());
    }

    #[test]
    fn connectedness_solutions() {
        let report = connectedness_check().unwrap();
        assert_eq!(report.solutions, vec![[0, 0, 0], [16, 12, 12]]);
        for eq in &report.system {
            assert_eq!(eq.evaluate(16, 12, 12), 0);
            assert_eq!(eq.evaluate(0, 0, 0), 0);
        }
        assert!(report.c_free.is_c_free());
    }

    #[test]
    fn printed_system_has_the_same_span_and_solutions() {
        let printed = [
            QuadPoly([0, 56, -20, 0, -5, 4, 0, -1, 0, 0]),
            QuadPoly([0, 72, -52, 20, -6, 8, -4, -2, 2, 0]),
            QuadPoly([0, -72, 36, -4, 6, -6, 2, 1, 0, -1]),
        ];
        let derived = connectedness_check().unwrap().system;
        let rank_of = |eqs: &[QuadPoly]| {
            let rows: Vec<Vec<Rational>> = eqs.iter().map(|e| e.0.iter().map(|&x| Rational::new(x, 1)).collect()).collect();
            crate::linalg::rank(&rows, 10)
        };
        let mut both = derived.to_vec();
        both.extend(printed);
        assert_eq!(rank_of(&derived), 3);
        assert_eq!(rank_of(&printed), 3);
        assert_eq!(rank_of(&both), 3);
        assert_eq!(solve_integer_system(&printed).unwrap(), vec![[0, 0, 0], [16, 12, 12]]);
        assert_eq!(c_free_combination(&derived).unwrap(), printed[0]);
    }

    #[test]
    fn definiteness_is_required() {
        let indefinite = [QuadPoly([0, 0, 0, 0, 1, 0, 0, -1, 0, 0])];
        assert!(matches!(solve_integer_system(&indefinite), Err(Error::Degenerate(_))));
    }
}
