//! Exterior algebra of a 6-dimensional space W with basis e1..e6.
//!
//! A basis k-vector e_S is indexed by the bitmask of S (bit i-1 for e_i); within a
//! grade, subsets are ordered lexicographically as increasing tuples. Signs come
//! from the parity of the sorting permutation.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{same_field, Field};

pub const DIM: usize = 6;
pub const TOP_MASK: u8 = 0b11_1111;

struct Tables {
    by_grade: Vec<Vec<u8>>,
    index: [usize; 64],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut by_grade = vec![Vec::new(); DIM + 1];
        let mut index = [0usize; 64];
        for grade in 0..=DIM {
            let mut list: Vec<u8> = (0u8..64).filter(|m| m.count_ones() as usize == grade).collect();
            list.sort_by_key(|&m| elements(m));
            for (i, &m) in list.iter().enumerate() {
                index[m as usize] = i;
            }
            by_grade[grade] = list;
        }
        Tables { by_grade, index }
    })
}

/// Zero-based elements of a mask, increasing.
pub fn elements(mask: u8) -> Vec<usize> {
    (0..DIM).filter(|i| mask >> i & 1 == 1).collect()
}

/// Basis masks of the given grade in lexicographic order.
pub fn basis_masks(grade: usize) -> &'static [u8] {
    &tables().by_grade[grade]
}

pub fn mask_index(mask: u8) -> usize {
    tables().index[mask as usize]
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of e_a ∧ e_b relative to e_{a∪b}; zero if they overlap.
pub fn wedge_sign(a: u8, b: u8) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let inversions: u32 = elements(b).iter().map(|&j| (a >> (j + 1)).count_ones()).sum();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Mask from one-based labels, e.g. `[1, 2, 3]` for e123.
pub fn mask_of(labels: &[usize]) -> u8 {
    labels.iter().fold(0u8, |m, &i| {
        assert!((1..=DIM).contains(&i), "basis label {i} out of range");
        m | 1 << (i - 1)
    })
}

/// Homogeneous element of ∧^grade W, stored densely in the lexicographic basis.
#[derive(Clone, PartialEq)]
pub struct MultiVector<F: Field> {
    grade: usize,
    coords: Vec<F>,
    ctx: F::Ctx,
}

pub type TriVector<F> = MultiVector<F>;

impl<F: Field> MultiVector<F> {
    pub fn zero(ctx: F::Ctx, grade: usize) -> Self {
        assert!(grade <= DIM);
        MultiVector { grade, coords: vec![F::zero(ctx); binomial(DIM, grade)], ctx }
    }

    pub fn from_coords(ctx: F::Ctx, grade: usize, coords: Vec<F>) -> Result<Self> {
        if grade > DIM || coords.len() != binomial(DIM, grade) {
            return Err(Error::DimensionMismatch(format!("{} coordinates for grade {grade}", coords.len())));
        }
        for c in &coords {
            same_field::<F>(ctx, c.ctx())?;
        }
        Ok(MultiVector { grade, coords, ctx })
    }

    /// The basis element e_S for one-based labels S (any order; sign applied).
    pub fn basis(ctx: F::Ctx, labels: &[usize]) -> Self {
        let mut result = MultiVector::scalar(ctx, F::one(ctx));
        for &label in labels {
            result = result.wedge(&MultiVector::unit(ctx, label)).expect("grade within range");
        }
        result
    }

    pub fn unit(ctx: F::Ctx, label: usize) -> Self {
        let mut v = MultiVector::zero(ctx, 1);
        v.coords[label - 1] = F::one(ctx);
        v
    }

    pub fn scalar(ctx: F::Ctx, value: F) -> Self {
        MultiVector { grade: 0, coords: vec![value], ctx }
    }

    pub fn vector(ctx: F::Ctx, components: &[F]) -> Result<Self> {
        MultiVector::from_coords(ctx, 1, components.to_vec())
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn ctx(&self) -> F::Ctx {
        self.ctx
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<F> {
        self.coords
    }

    pub fn coeff(&self, mask: u8) -> &F {
        assert_eq!(mask.count_ones() as usize, self.grade);
        &self.coords[mask_index(mask)]
    }

    pub fn set(&mut self, mask: u8, value: F) {
        assert_eq!(mask.count_ones() as usize, self.grade);
        self.coords[mask_index(mask)] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(F::is_zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &F)> + '_ {
        basis_masks(self.grade).iter().copied().zip(self.coords.iter()).filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, factor: &F) -> Self {
        MultiVector {
            grade: self.grade,
            coords: self.coords.iter().map(|c| c.clone() * factor.clone()).collect(),
            ctx: self.ctx,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        if self.grade != other.grade {
            return Err(Error::WrongGrade { expected: self.grade, found: other.grade });
        }
        Ok(MultiVector {
            grade: self.grade,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect(),
            ctx: self.ctx,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-F::one(self.ctx)))
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        same_field::<F>(self.ctx, other.ctx)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        if self.grade + other.grade > DIM {
            return Err(Error::GradeOverflow(self.grade, other.grade));
        }
        let mut result = MultiVector::zero(self.ctx, self.grade + other.grade);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let sign = wedge_sign(a, b);
                if sign == 0 {
                    continue;
                }
                let slot: &mut F = &mut result.coords[mask_index(a | b)];
                let product = ca.clone() * cb.clone();
                *slot = if sign > 0 { slot.clone() + product } else { slot.clone() - product };
            }
        }
        Ok(result)
    }

    /// Interior product with the covector Σ f_i e_i*: ι(e_i*) e_S = (−1)^{#{j ∈ S : j < i}} e_{S∖i}.
    pub fn contract(&self, covector: &[F]) -> Result<Self> {
        if covector.len() != DIM {
            return Err(Error::DimensionMismatch(format!("covector of length {}", covector.len())));
        }
        if self.grade == 0 {
            return Err(Error::WrongGrade { expected: 1, found: 0 });
        }
        for f in covector {
            same_field::<F>(self.ctx, f.ctx())?;
        }
        let mut result = MultiVector::zero(self.ctx, self.grade - 1);
        for (mask, c) in self.terms() {
            for i in elements(mask) {
                if covector[i].is_zero() {
                    continue;
                }
                let below = (mask & ((1u8 << i) - 1)).count_ones();
                let slot: &mut F = &mut result.coords[mask_index(mask & !(1 << i))];
                let term = c.clone() * covector[i].clone();
                *slot = if below % 2 == 0 { slot.clone() + term } else { slot.clone() - term };
            }
        }
        Ok(result)
    }

    /// Contraction with the dual basis covector e_label*.
    pub fn contract_basis(&self, label: usize) -> Result<Self> {
        let mut covector = vec![F::zero(self.ctx); DIM];
        covector[label - 1] = F::one(self.ctx);
        self.contract(&covector)
    }

    /// Coefficient of e123456, normalized by vol(e1∧…∧e6) = 1.
    pub fn volume(&self) -> Result<F> {
        if self.grade != DIM {
            return Err(Error::WrongGrade { expected: DIM, found: self.grade });
        }
        Ok(self.coords[0].clone())
    }
}

impl<F: Field> fmt::Debug for MultiVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Field> fmt::Display for MultiVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let label: String = elements(mask).iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{c}·e{label}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// η(u, v) = vol(u ∧ v) on ∧³W.
pub fn eta<F: Field>(u: &TriVector<F>, v: &TriVector<F>) -> Result<F> {
    for w in [u, v] {
        if w.grade() != 3 {
            return Err(Error::WrongGrade { expected: 3, found: w.grade() });
        }
    }
    u.wedge(v)?.volume()
}

/// η on coordinate rows of ∧³W, without building multivectors.
pub fn eta_coords<F: Field>(u: &[F], v: &[F]) -> F {
    let masks = basis_masks(3);
    let mut acc = F::zero(u[0].ctx());
    for (i, &m) in masks.iter().enumerate() {
        if u[i].is_zero() {
            continue;
        }
        let comp = TOP_MASK & !m;
        let partner = &v[mask_index(comp)];
        if partner.is_zero() {
            continue;
        }
        let term = u[i].clone() * partner.clone();
        acc = if wedge_sign(m, comp) > 0 { acc + term } else { acc - term };
    }
    acc
}

/// Gram matrix of η in the lexicographic basis of ∧³W.
pub fn eta_gram<F: Field>(ctx: F::Ctx) -> Vec<Vec<F>> {
    let masks = basis_masks(3);
    masks
        .iter()
        .map(|&a| masks.iter().map(|&b| F::from_i64(ctx, if a & b == 0 { wedge_sign(a, b) } else { 0 })).collect())
        .collect()
}
