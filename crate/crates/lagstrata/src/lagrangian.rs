//! Lagrangian subspaces of (∧³W, η): tangent spaces T_U, the spaces F_[w],
//! graphs of symmetric maps over a transverse frame, and decomposability.

use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, eta_coords, eta_gram, mask_of, MultiVector, TriVector, DIM};
use crate::linalg::{inverse, kernel, mat_mul, rank, transpose, vec_mat, LinearSubspace, Matrix};
use crate::scalar::{same_field, Field};

pub const LAGRANGIAN_DIM: usize = 10;
pub const TRIVECTOR_DIM: usize = 20;

/// A 10-dimensional η-isotropic subspace of ∧³W.
#[derive(Clone, PartialEq, Debug)]
pub struct Lagrangian<F: Field> {
    space: LinearSubspace<F>,
}

impl<F: Field> Lagrangian<F> {
    pub fn new(space: LinearSubspace<F>) -> Result<Self> {
        if space.ambient() != TRIVECTOR_DIM || space.dim() != LAGRANGIAN_DIM {
            return Err(Error::NotLagrangian(format!("dimension {} in F^{}", space.dim(), space.ambient())));
        }
        if !is_isotropic(&space) {
            return Err(Error::NotLagrangian("η does not vanish".into()));
        }
        Ok(Lagrangian { space })
    }

    pub fn from_rows(ctx: F::Ctx, rows: &[Vec<F>]) -> Result<Self> {
        Lagrangian::new(LinearSubspace::span(ctx, TRIVECTOR_DIM, rows)?)
    }

    pub fn space(&self) -> &LinearSubspace<F> {
        &self.space
    }

    pub fn basis(&self) -> &Matrix<F> {
        self.space.basis()
    }

    pub fn ctx(&self) -> F::Ctx {
        self.space.ctx()
    }

    pub fn contains(&self, omega: &TriVector<F>) -> bool {
        self.space.contains(omega.coords())
    }

    pub fn meet_dim(&self, other: &Lagrangian<F>) -> Result<usize> {
        Ok(self.space.intersect(&other.space)?.dim())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.basis().iter().map(|row| Value::Array(row.iter().map(Field::to_json).collect())).collect())
    }
}

pub fn is_isotropic<F: Field>(space: &LinearSubspace<F>) -> bool {
    let rows = space.basis();
    rows.iter().enumerate().all(|(i, u)| rows[i + 1..].iter().all(|v| eta_coords(u, v).is_zero()))
}

/// Checks maximality through the annihilator as well as isotropy.
pub fn is_lagrangian<F: Field>(space: &LinearSubspace<F>) -> bool {
    space.ambient() == TRIVECTOR_DIM
        && space.dim() == LAGRANGIAN_DIM
        && space.annihilator(&eta_gram(space.ctx())).map(|a| a == *space).unwrap_or(false)
}

fn triple_wedge<F: Field>(ctx: F::Ctx, u: &[F], v: &[F], w: &[F]) -> Result<TriVector<F>> {
    MultiVector::vector(ctx, u)?.wedge(&MultiVector::vector(ctx, v)?)?.wedge(&MultiVector::vector(ctx, w)?)
}

/// Decomposable trivector u1∧u2∧u3 from the three rows of `u`.
pub fn plucker<F: Field>(u: &LinearSubspace<F>) -> Result<TriVector<F>> {
    if u.ambient() != DIM || u.dim() != 3 {
        return Err(Error::DimensionMismatch(format!("need a 3-dimensional subspace of F^6, got dim {}", u.dim())));
    }
    let b = u.basis();
    triple_wedge(u.ctx(), &b[0], &b[1], &b[2])
}

/// T_U = ∧²U ∧ W.
pub fn tangent_space<F: Field>(u: &LinearSubspace<F>) -> Result<Lagrangian<F>> {
    if u.ambient() != DIM || u.dim() != 3 {
        return Err(Error::DimensionMismatch(format!("need a 3-dimensional subspace of F^6, got dim {}", u.dim())));
    }
    let ctx = u.ctx();
    let b = u.basis();
    let mut rows = Vec::with_capacity(18);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let pair = MultiVector::vector(ctx, &b[i])?.wedge(&MultiVector::vector(ctx, &b[j])?)?;
        for k in 1..=DIM {
            rows.push(pair.wedge(&MultiVector::unit(ctx, k))?.into_coords());
        }
    }
    Lagrangian::from_rows(ctx, &rows)
}

/// F_[w] = w ∧ ∧²W.
pub fn f_space<F: Field>(ctx: F::Ctx, w: &[F]) -> Result<Lagrangian<F>> {
    if w.len() != DIM {
        return Err(Error::DimensionMismatch(format!("vector of length {}", w.len())));
    }
    if w.iter().all(F::is_zero) {
        return Err(Error::ZeroVector);
    }
    let wv = MultiVector::vector(ctx, w)?;
    let rows: Vec<Vec<F>> = basis_masks(2)
        .iter()
        .map(|&m| {
            let mut pair = MultiVector::zero(ctx, 2);
            pair.set(m, F::one(ctx));
            wv.wedge(&pair).map(MultiVector::into_coords)
        })
        .collect::<Result<_>>()?;
    Lagrangian::from_rows(ctx, &rows)
}

/// Span of e_i for one-based labels.
pub fn coordinate_subspace<F: Field>(ctx: F::Ctx, labels: &[usize]) -> LinearSubspace<F> {
    let rows: Vec<Vec<F>> = labels.iter().map(|&l| MultiVector::<F>::unit(ctx, l).into_coords()).collect();
    LinearSubspace::span(ctx, DIM, &rows).expect("coordinate vectors")
}

/// Some(U) with ∧³U = ⟨ω⟩ when ω is decomposable, None otherwise.
pub fn is_decomposable<F: Field>(omega: &TriVector<F>) -> Result<Option<LinearSubspace<F>>> {
    if omega.grade() != 3 {
        return Err(Error::WrongGrade { expected: 3, found: omega.grade() });
    }
    if omega.is_zero() {
        return Err(Error::ZeroVector);
    }
    let ctx = omega.ctx();
    let images: Matrix<F> =
        (1..=DIM).map(|i| MultiVector::unit(ctx, i).wedge(omega).map(MultiVector::into_coords)).collect::<Result<_>>()?;
    let annihilating = kernel(ctx, &transpose(&images, 15), DIM);
    if annihilating.len() == 3 {
        Ok(Some(LinearSubspace::span(ctx, DIM, &annihilating)?))
    } else {
        Ok(None)
    }
}

/// A pair of transverse Lagrangians with the dual basis of L∞ under η.
#[derive(Clone, Debug)]
pub struct LagrangianFrame<F: Field> {
    l0: Lagrangian<F>,
    linf: Lagrangian<F>,
    /// Rows a_i: the echelon basis of L0.
    zero_basis: Matrix<F>,
    /// Rows b_j in L∞ with η(a_i, b_j) = δ_ij.
    dual_basis: Matrix<F>,
}

impl<F: Field> LagrangianFrame<F> {
    pub fn new(l0: Lagrangian<F>, linf: Lagrangian<F>) -> Result<Self> {
        same_field::<F>(l0.ctx(), linf.ctx())?;
        let ctx = l0.ctx();
        let zero_basis = l0.basis().clone();
        let cross: Matrix<F> =
            zero_basis.iter().map(|a| linf.basis().iter().map(|c| eta_coords(a, c)).collect()).collect();
        let inv = inverse(ctx, &cross).ok_or(Error::NotTransverse)?;
        // η(a_i, Σ_k X_jk c_k) = (cross · Xᵀ)_ij, so X = (cross⁻¹)ᵀ.
        let x = transpose(&inv, LAGRANGIAN_DIM);
        let dual_basis = mat_mul(ctx, &x, linf.basis(), TRIVECTOR_DIM);
        Ok(LagrangianFrame { l0, linf, zero_basis, dual_basis })
    }

    /// (T_{U0}, T_{U∞}) with U0 = ⟨e1,e2,e3⟩, U∞ = ⟨e4,e5,e6⟩.
    pub fn canonical(ctx: F::Ctx) -> Self {
        let t0 = tangent_space(&coordinate_subspace(ctx, &[1, 2, 3])).expect("tangent space");
        let tinf = tangent_space(&coordinate_subspace(ctx, &[4, 5, 6])).expect("tangent space");
        LagrangianFrame::new(t0, tinf).expect("transverse coordinate frame")
    }

    pub fn l0(&self) -> &Lagrangian<F> {
        &self.l0
    }

    pub fn linf(&self) -> &Lagrangian<F> {
        &self.linf
    }

    pub fn zero_basis(&self) -> &Matrix<F> {
        &self.zero_basis
    }

    pub fn dual_basis(&self) -> &Matrix<F> {
        &self.dual_basis
    }

    pub fn ctx(&self) -> F::Ctx {
        self.l0.ctx()
    }

    /// The vector Σ x_i a_i of L0.
    pub fn point_of_l0(&self, x: &[F]) -> Vec<F> {
        vec_mat(self.ctx(), x, &self.zero_basis, TRIVECTOR_DIM)
    }
}

/// L = span{a_i + Σ_j M_ij b_j}.
pub fn lagrangian_from_graph<F: Field>(frame: &LagrangianFrame<F>, m: &[Vec<F>]) -> Result<Lagrangian<F>> {
    if m.len() != LAGRANGIAN_DIM || m.iter().any(|r| r.len() != LAGRANGIAN_DIM) {
        return Err(Error::DimensionMismatch("graph matrix must be 10×10".into()));
    }
    if !crate::linalg::is_symmetric(m) {
        return Err(Error::NotSymmetric);
    }
    let ctx = frame.ctx();
    let shifted = mat_mul(ctx, m, frame.dual_basis(), TRIVECTOR_DIM);
    let rows: Matrix<F> = frame
        .zero_basis()
        .iter()
        .zip(&shifted)
        .map(|(a, s)| a.iter().zip(s).map(|(x, y)| x.clone() + y.clone()).collect())
        .collect();
    Lagrangian::from_rows(ctx, &rows)
}

/// Inverse of [`lagrangian_from_graph`]; fails when L meets L∞.
pub fn graph_of<F: Field>(frame: &LagrangianFrame<F>, l: &Lagrangian<F>) -> Result<Matrix<F>> {
    same_field::<F>(frame.ctx(), l.ctx())?;
    let ctx = frame.ctx();
    // For r = Σ x_i a_i + Σ y_j b_j: x_i = η(r, b_i) and y_j = η(a_j, r).
    let x: Matrix<F> = l.basis().iter().map(|r| frame.dual_basis().iter().map(|b| eta_coords(r, b)).collect()).collect();
    let y: Matrix<F> = l.basis().iter().map(|r| frame.zero_basis().iter().map(|a| eta_coords(a, r)).collect()).collect();
    let x_inv = inverse(ctx, &x).ok_or(Error::NotTransverse)?;
    Ok(mat_mul(ctx, &x_inv, &y, LAGRANGIAN_DIM))
}

pub fn random_symmetric<F: Field, R: Rng + ?Sized>(ctx: F::Ctx, n: usize, rng: &mut R) -> Matrix<F> {
    let mut m = vec![vec![F::zero(ctx); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = F::random(ctx, rng);
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    m
}

/// Uniform symmetric graph over the canonical frame; misses Lagrangians meeting T_{U∞}.
pub fn random_graph_lagrangian<F: Field, R: Rng + ?Sized>(frame: &LagrangianFrame<F>, rng: &mut R) -> Lagrangian<F> {
    let m = random_symmetric(frame.ctx(), LAGRANGIAN_DIM, rng);
    lagrangian_from_graph(frame, &m).expect("symmetric graph is Lagrangian")
}

pub fn random_subspace<F: Field, R: Rng + ?Sized>(ctx: F::Ctx, ambient: usize, dim: usize, rng: &mut R) -> LinearSubspace<F> {
    loop {
        let rows: Matrix<F> = (0..dim).map(|_| (0..ambient).map(|_| F::random(ctx, rng)).collect()).collect();
        if rank(&rows, ambient) == dim {
            return LinearSubspace::span(ctx, ambient, &rows).expect("rows of the right length");
        }
    }
}

pub fn basis_trivector<F: Field>(ctx: F::Ctx, labels: [usize; 3]) -> TriVector<F> {
    let mut t = MultiVector::zero(ctx, 3);
    t.set(mask_of(&labels), F::one(ctx));
    t
}

/// The 20×20 matrix of ∧³g for g acting on row vectors by v ↦ v·g.
pub fn wedge3_matrix<F: Field>(ctx: F::Ctx, g: &[Vec<F>]) -> Result<Matrix<F>> {
    if g.len() != DIM || g.iter().any(|r| r.len() != DIM) {
        return Err(Error::DimensionMismatch("need a 6×6 matrix".into()));
    }
    basis_masks(3)
        .iter()
        .map(|&m| {
            let idx = crate::exterior::elements(m);
            triple_wedge(ctx, &g[idx[0]], &g[idx[1]], &g[idx[2]]).map(MultiVector::into_coords)
        })
        .collect()
}

/// Applies g to a subspace of W and ∧³g to a Lagrangian together.
pub fn transform_pair<F: Field>(
    g: &[Vec<F>],
    a: &Lagrangian<F>,
    u: &LinearSubspace<F>,
) -> Result<(Lagrangian<F>, LinearSubspace<F>)> {
    let ctx = a.ctx();
    let big = wedge3_matrix(ctx, g)?;
    let a_image = Lagrangian::from_rows(ctx, &mat_mul(ctx, a.basis(), &big, TRIVECTOR_DIM))?;
    let u_image = LinearSubspace::span(ctx, DIM, &mat_mul(ctx, u.basis(), g, DIM))?;
    Ok((a_image, u_image))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, Prime, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p101() -> Prime {
        Prime::new(101).unwrap()
    }

    #[test]
    fn tangent_space_of_coordinate_plane() {
        let t = tangent_space(&coordinate_subspace::<Rational>((), &[1, 2, 3])).unwrap();
        let expected: Vec<Vec<Rational>> = [[1, 2, 3], [1, 2, 4], [1, 2, 5], [1, 2, 6], [1, 3, 4], [1, 3, 5], [1, 3, 6], [2, 3, 4], [2, 3, 5], [2, 3, 6]]
            .iter()
            .map(|&l| basis_trivector::<Rational>((), l).into_coords())
            .collect();
        assert_eq!(t.basis(), &expected);
    }

    #[test]
    fn tangent_spaces_are_lagrangian_and_contain_plucker() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let u = random_subspace::<Fp, _>(p101(), 6, 3, &mut rng);
            let t = tangent_space(&u).unwrap();
            assert!(is_lagrangian(t.space()));
            assert!(t.contains(&plucker(&u).unwrap()));
        }
        for _ in 0..10 {
            let u = random_subspace::<Rational, _>((), 6, 3, &mut rng);
            assert!(is_lagrangian(tangent_space(&u).unwrap().space()));
        }
    }

    /// W = U ⊕ V splits ∧³W into four blocks; T_U and T_V share none of them.
    #[test]
    fn transverse_tangent_spaces_are_transverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut dims = Vec::new();
        for _ in 0..50 {
            let u = random_subspace::<Fp, _>(p101(), 6, 3, &mut rng);
            let v = random_subspace::<Fp, _>(p101(), 6, 3, &mut rng);
            if u.intersect(&v).unwrap().dim() != 0 {
                continue;
            }
            dims.push(tangent_space(&u).unwrap().meet_dim(&tangent_space(&v).unwrap()).unwrap());
        }
        assert!(dims.len() > 40);
        assert!(dims.iter().all(|&d| d == 0), "{dims:?}");
    }

    #[test]
    fn coordinate_tangent_spaces_are_transverse() {
        let frame = LagrangianFrame::<Rational>::canonical(());
        assert_eq!(frame.l0().meet_dim(frame.linf()).unwrap(), 0);
    }

    #[test]
    fn f_space_examples() {
        let e1 = MultiVector::<Rational>::unit((), 1).into_coords();
        let f = f_space((), &e1).unwrap();
        let expected: Vec<Vec<Rational>> = (2..=6)
            .flat_map(|i| ((i + 1)..=6).map(move |j| (i, j)))
            .map(|(i, j)| basis_trivector::<Rational>((), [1, i, j]).into_coords())
            .collect();
        assert_eq!(f.space(), &LinearSubspace::span((), 20, &expected).unwrap());
        let two_e1: Vec<Rational> = e1.iter().map(|x| x.clone() * Rational::from_i64((), 2)).collect();
        assert_eq!(f_space((), &two_e1).unwrap(), f);
        assert!(matches!(f_space::<Rational>((), &vec![Rational::from_i64((), 0); 6]), Err(Error::ZeroVector)));
    }

    #[test]
    fn f_space_meets_tangent_space_in_seven_or_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let u = random_subspace::<Fp, _>(p101(), 6, 3, &mut rng);
            let t = tangent_space(&u).unwrap();
            let coeffs: Vec<Fp> = (0..3).map(|_| Fp::random(p101(), &mut rng)).collect();
            let inside = vec_mat(p101(), &coeffs, u.basis(), 6);
            if inside.iter().all(Fp::is_zero) {
                continue;
            }
            assert_eq!(f_space(p101(), &inside).unwrap().meet_dim(&t).unwrap(), 7);
            let outside: Vec<Fp> = (0..6).map(|_| Fp::random(p101(), &mut rng)).collect();
            if !u.contains(&outside) {
                assert_eq!(f_space(p101(), &outside).unwrap().meet_dim(&t).unwrap(), 3);
            }
        }
    }

    /// Oracle: brute-force intersection over random independent pairs.
    #[test]
    fn f_spaces_of_independent_vectors_meet_in_dimension_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let w = random_subspace::<Fp, _>(p101(), 6, 2, &mut rng);
            let a = f_space(p101(), &w.basis()[0]).unwrap();
            let b = f_space(p101(), &w.basis()[1]).unwrap();
            assert_eq!(a.meet_dim(&b).unwrap(), 4);
        }
    }

    #[test]
    fn graph_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let frame = LagrangianFrame::<Fp>::canonical(p101());
        let zero = vec![vec![Fp::zero(p101()); 10]; 10];
        assert_eq!(lagrangian_from_graph(&frame, &zero).unwrap(), *frame.l0());
        for _ in 0..100 {
            let m = random_symmetric::<Fp, _>(p101(), 10, &mut rng);
            let l = lagrangian_from_graph(&frame, &m).unwrap();
            assert!(is_lagrangian(l.space()));
            assert_eq!(graph_of(&frame, &l).unwrap(), m);
        }
        assert!(matches!(graph_of(&frame, frame.linf()), Err(Error::NotTransverse)));
        let qframe = LagrangianFrame::<Rational>::canonical(());
        for _ in 0..10 {
            let m = random_symmetric::<Rational, _>((), 10, &mut rng);
            let l = lagrangian_from_graph(&qframe, &m).unwrap();
            assert_eq!(graph_of(&qframe, &l).unwrap(), m);
            assert_eq!(lagrangian_from_graph(&qframe, &graph_of(&qframe, &l).unwrap()).unwrap(), l);
        }
    }

    #[test]
    fn asymmetric_graph_is_rejected() {
        let frame = LagrangianFrame::<Fp>::canonical(p101());
        let mut m = vec![vec![Fp::zero(p101()); 10]; 10];
        m[0][1] = p101().element(1);
        assert!(matches!(lagrangian_from_graph(&frame, &m), Err(Error::NotSymmetric)));
    }

    #[test]
    fn decomposability_examples() {
        let e123 = basis_trivector::<Rational>((), [1, 2, 3]);
        let witness = is_decomposable(&e123).unwrap().unwrap();
        assert_eq!(witness, coordinate_subspace((), &[1, 2, 3]));
        let e456 = basis_trivector::<Rational>((), [4, 5, 6]);
        assert!(is_decomposable(&e123.add(&e456).unwrap()).unwrap().is_none());
        let e1 = MultiVector::<Rational>::unit((), 1);
        let sum = MultiVector::basis((), &[2, 3]).add(&MultiVector::basis((), &[4, 5])).unwrap();
        assert!(is_decomposable(&e1.wedge(&sum).unwrap()).unwrap().is_none());
        assert!(matches!(is_decomposable(&MultiVector::<Rational>::zero((), 3)), Err(Error::ZeroVector)));
    }

    /// Direct 6×15 rank computation as the oracle for the kernel dimension.
    #[test]
    fn decomposability_kernel_dimensions() {
        let rank_of = |omega: &TriVector<Rational>| {
            let rows: Vec<Vec<Rational>> = (1..=6).map(|i| MultiVector::unit((), i).wedge(omega).unwrap().into_coords()).collect();
            6 - rank(&rows, 15)
        };
        let e123 = basis_trivector::<Rational>((), [1, 2, 3]);
        let e456 = basis_trivector::<Rational>((), [4, 5, 6]);
        assert_eq!(rank_of(&e123.add(&e456).unwrap()), 0);
        let mixed = MultiVector::<Rational>::unit((), 1)
            .wedge(&MultiVector::basis((), &[2, 3]).add(&MultiVector::basis((), &[4, 5])).unwrap())
            .unwrap();
        assert_eq!(rank_of(&mixed), 1);
    }

    #[test]
    fn plucker_cone_members_are_decomposable() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let u = random_subspace::<Fp, _>(p101(), 6, 3, &mut rng);
            let omega = plucker(&u).unwrap().scale(&p101().element(rng.gen_range(1..101)));
            assert_eq!(is_decomposable(&omega).unwrap().unwrap(), u);
            let t = tangent_space(&u).unwrap();
            let generic: Vec<Fp> = (0..10).map(|_| Fp::random(p101(), &mut rng)).collect();
            let omega = MultiVector::from_coords(p101(), 3, vec_mat(p101(), &generic, t.basis(), 20)).unwrap();
            if !omega.is_zero() && is_decomposable(&omega).unwrap().is_some() {
                // Decomposables inside T_U are cones over P²×P²: rare for a random element.
                assert!(t.contains(&omega));
            }
        }
    }
}
