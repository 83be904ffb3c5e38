//! Dense exact linear algebra and canonical subspaces.

use crate::error::{Error, Result};
use crate::scalar::{same_field, Field};

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row-echelon form: zero rows dropped, pivots normalized to 1.
/// Returns the rows and their pivot columns.
pub fn rref<F: Field>(rows: &[Vec<F>], ncols: usize) -> (Matrix<F>, Vec<usize>) {
    let mut m: Matrix<F> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(found) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, found);
        let inverse = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.clone() * inverse.clone();
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = x.clone() - factor.clone() * y.clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<F: Field>(rows: &[Vec<F>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of {x : A x = 0} for A given by rows of length `ncols`.
pub fn kernel<F: Field>(ctx: F::Ctx, rows: &[Vec<F>], ncols: usize) -> Matrix<F> {
    let (reduced, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(ctx); ncols];
            v[f] = F::one(ctx);
            for (row, &pc) in reduced.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn transpose<F: Field>(m: &[Vec<F>], ncols: usize) -> Matrix<F> {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul<F: Field>(ctx: F::Ctx, a: &[Vec<F>], b: &[Vec<F>], bcols: usize) -> Matrix<F> {
    a.iter()
        .map(|row| {
            (0..bcols)
                .map(|j| {
                    row.iter().zip(b).fold(F::zero(ctx), |acc, (x, brow)| {
                        if x.is_zero() {
                            acc
                        } else {
                            acc + x.clone() * brow[j].clone()
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(ctx: F::Ctx, a: &[Vec<F>], v: &[F]) -> Vec<F> {
    a.iter().map(|row| dot(ctx, row, v)).collect()
}

pub fn dot<F: Field>(ctx: F::Ctx, a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(ctx), |acc, (x, y)| if x.is_zero() { acc } else { acc + x.clone() * y.clone() })
}

/// Row vector times matrix.
pub fn vec_mat<F: Field>(ctx: F::Ctx, v: &[F], a: &[Vec<F>], ncols: usize) -> Vec<F> {
    let mut out = vec![F::zero(ctx); ncols];
    for (x, row) in v.iter().zip(a) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o = o.clone() + x.clone() * y.clone();
        }
    }
    out
}

pub fn identity<F: Field>(ctx: F::Ctx, n: usize) -> Matrix<F> {
    (0..n).map(|i| (0..n).map(|j| if i == j { F::one(ctx) } else { F::zero(ctx) }).collect()).collect()
}

pub fn determinant<F: Field>(ctx: F::Ctx, square: &[Vec<F>]) -> F {
    let n = square.len();
    let mut m = square.to_vec();
    let mut det = F::one(ctx);
    for c in 0..n {
        let Some(found) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return F::zero(ctx);
        };
        if found != c {
            m.swap(found, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det = det * pivot.clone();
        let inverse = pivot.inv().expect("nonzero pivot");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone() * inverse.clone();
            for j in c..n {
                let value = m[i][j].clone() - factor.clone() * m[c][j].clone();
                m[i][j] = value;
            }
        }
    }
    det
}

pub fn inverse<F: Field>(ctx: F::Ctx, square: &[Vec<F>]) -> Option<Matrix<F>> {
    let n = square.len();
    let augmented: Matrix<F> = square
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one(ctx) } else { F::zero(ctx) }));
            r
        })
        .collect();
    let (reduced, pivots) = rref(&augmented, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(reduced.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Some solution of A x = b, if one exists.
pub fn solve<F: Field>(ctx: F::Ctx, a: &[Vec<F>], b: &[F], ncols: usize) -> Option<Vec<F>> {
    let augmented: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, value)| {
            let mut r = row.clone();
            r.push(value.clone());
            r
        })
        .collect();
    let (reduced, pivots) = rref(&augmented, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(ctx); ncols];
    for (row, &pc) in reduced.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

pub fn is_symmetric<F: Field>(m: &[Vec<F>]) -> bool {
    m.iter().enumerate().all(|(i, row)| row.len() == m.len() && (0..i).all(|j| row[j] == m[j][i]))
}

/// A subspace of F^ambient stored by its reduced row-echelon basis, so equality is canonical.
#[derive(Clone, PartialEq, Debug)]
pub struct LinearSubspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
    ctx: F::Ctx,
}

impl<F: Field> LinearSubspace<F> {
    pub fn span(ctx: F::Ctx, ambient: usize, vectors: &[Vec<F>]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch(format!("vector of length {} in F^{ambient}", v.len())));
            }
            for x in v {
                same_field::<F>(ctx, x.ctx())?;
            }
        }
        Ok(LinearSubspace { ambient, basis: rref(vectors, ambient).0, ctx })
    }

    pub fn zero(ctx: F::Ctx, ambient: usize) -> Self {
        LinearSubspace { ambient, basis: Vec::new(), ctx }
    }

    pub fn full(ctx: F::Ctx, ambient: usize) -> Self {
        LinearSubspace { ambient, basis: identity(ctx, ambient), ctx }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn ctx(&self) -> F::Ctx {
        self.ctx
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        same_field::<F>(self.ctx, other.ctx)?;
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(format!("ambient {} vs {}", self.ambient, other.ambient)));
        }
        Ok(())
    }

    pub fn contains(&self, v: &[F]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(&rows, self.ambient) == self.dim()
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        LinearSubspace::span(self.ctx, self.ambient, &rows)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut stacked = self.basis.clone();
        stacked.extend(other.basis.iter().cloned());
        let relations = kernel(self.ctx, &transpose(&stacked, self.ambient), stacked.len());
        let vectors: Matrix<F> =
            relations.iter().map(|c| vec_mat(self.ctx, &c[..self.dim()], &self.basis, self.ambient)).collect();
        LinearSubspace::span(self.ctx, self.ambient, &vectors)
    }

    /// {y : x·P·y = 0 for all x in self}, where P has `self.ambient` rows.
    pub fn annihilator(&self, pairing: &[Vec<F>]) -> Result<Self> {
        if pairing.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "pairing has {} rows, subspace lives in F^{}",
                pairing.len(),
                self.ambient
            )));
        }
        let right = pairing.first().map_or(0, Vec::len);
        let conditions = mat_mul(self.ctx, &self.basis, pairing, right);
        let solutions = kernel(self.ctx, &conditions, right);
        LinearSubspace::span(self.ctx, right, &solutions)
    }

    /// Coordinates of v in the stored basis, if v lies in the subspace.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        let columns = transpose(&self.basis, self.ambient);
        solve(self.ctx, &columns, v, self.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{eta_gram, mask_of, MultiVector};
    use crate::scalar::{Fp, Prime, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix<F: Field>(ctx: F::Ctx, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<F> {
        (0..rows).map(|_| (0..cols).map(|_| F::random(ctx, rng)).collect()).collect()
    }

    #[test]
    fn intersect_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = LinearSubspace::span((), 7, &random_matrix::<Rational>((), 3, 7, &mut rng)).unwrap();
        assert_eq!(s.intersect(&s).unwrap(), s);
        assert_eq!(s.intersect(&LinearSubspace::full((), 7)).unwrap(), s);
    }

    #[test]
    fn annihilator_examples() {
        let gram = eta_gram::<Rational>(());
        let zero = LinearSubspace::<Rational>::zero((), 20);
        assert_eq!(zero.annihilator(&gram).unwrap().dim(), 20);
        let labels = [[1, 2, 3], [1, 2, 4], [1, 2, 5], [1, 2, 6], [1, 3, 4], [1, 3, 5], [1, 3, 6], [2, 3, 4], [2, 3, 5], [2, 3, 6]];
        let rows: Vec<Vec<Rational>> = labels.iter().map(|l| MultiVector::basis((), l).into_coords()).collect();
        let tangent = LinearSubspace::span((), 20, &rows).unwrap();
        assert_eq!(tangent.annihilator(&gram).unwrap(), tangent);
        assert!(LinearSubspace::<Rational>::zero((), 5).annihilator(&gram).is_err());
    }

    /// K = ⟨e12, e34, e15⟩ in ∧²V, V = ⟨e1..e5⟩, under (κ, β) ↦ vol(κ∧β∧e6).
    #[test]
    fn bivector_pairing_annihilator() {
        let two: Vec<u8> = crate::exterior::basis_masks(2).iter().copied().filter(|m| m & 0b10_0000 == 0).collect();
        let three: Vec<u8> = crate::exterior::basis_masks(3).iter().copied().filter(|m| m & 0b10_0000 == 0).collect();
        let pairing: Matrix<Rational> = two
            .iter()
            .map(|&a| {
                three
                    .iter()
                    .map(|&b| {
                        let s = if a & b == 0 { crate::exterior::wedge_sign(a, b) * crate::exterior::wedge_sign(a | b, 0b10_0000) } else { 0 };
                        Rational::from_i64((), s)
                    })
                    .collect()
            })
            .collect();
        let k_rows: Vec<Vec<Rational>> = [mask_of(&[1, 2]), mask_of(&[3, 4]), mask_of(&[1, 5])]
            .iter()
            .map(|&m| two.iter().map(|&t| Rational::from_i64((), (t == m) as i64)).collect())
            .collect();
        let k = LinearSubspace::span((), 10, &k_rows).unwrap();
        assert_eq!(k.annihilator(&pairing).unwrap().dim(), 7);
    }

    #[test]
    fn dimension_formulas_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = Prime::new(3).unwrap();
        let gram = eta_gram::<Fp>(p);
        for trial in 0..200 {
            let a = rand::Rng::gen_range(&mut rng, 0..=12);
            let b = rand::Rng::gen_range(&mut rng, 0..=12);
            let s1 = LinearSubspace::span(p, 20, &random_matrix::<Fp>(p, a, 20, &mut rng)).unwrap();
            let s2 = LinearSubspace::span(p, 20, &random_matrix::<Fp>(p, b, 20, &mut rng)).unwrap();
            let meet = s1.intersect(&s2).unwrap();
            let join = s1.sum(&s2).unwrap();
            assert_eq!(meet.dim() + join.dim(), s1.dim() + s2.dim(), "trial {trial}");
            assert!(s1.contains_subspace(&meet) && s2.contains_subspace(&meet));
            let ann = s1.annihilator(&gram).unwrap();
            assert_eq!(ann.dim(), 20 - s1.dim());
        }
    }

    #[test]
    fn determinant_and_inverse_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_matrix::<Rational>((), 5, 5, &mut rng);
            let det = determinant((), &m);
            match inverse((), &m) {
                Some(inv) => {
                    assert!(!det.is_zero());
                    assert_eq!(mat_mul((), &m, &inv, 5), identity((), 5));
                }
                None => assert!(det.is_zero()),
            }
        }
    }
}
