//! The K3 surface S_A attached to a Lagrangian A with dim(A ∩ F_[v0]) = 3, over F_p.
//!
//! W = V ⊕ ⟨v0⟩ with V = ⟨e1..e5⟩ and v0 = e6. Bivectors and trivectors of V are stored by
//! their coordinates on the ten basis masks avoiding e6, in lexicographic order. The volume
//! form on ∧⁵V is vol5(x) = vol(x ∧ v0).

mod normal_form;
mod residual;

pub use normal_form::{adapt_basis, newsystem_dimension, AdaptedBasis, NewSystemReport};
pub use residual::{projective_line, residual_search, residual_triple, BinaryForm, ProjectivePoint, ResidualSearch, ResidualTriple};

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{basis_masks, MultiVector, DIM};
use crate::lagrangian::{f_space, is_decomposable, random_symmetric, tangent_space, Lagrangian};
use crate::linalg::{inverse, kernel, mat_mul, mat_vec, rank, solve, transpose, LinearSubspace, Matrix};
use crate::scalar::{Field, Fp, Prime};

pub const V_DIM: usize = 5;
/// dim ∧²V = dim ∧³V.
pub const FORM_DIM: usize = 10;
pub const V0_LABEL: usize = 6;
pub const K_RANK: usize = 3;
/// Number of quadrics cutting out S_A: five Plücker quadrics and q_A*.
pub const QUADRIC_COUNT: usize = 6;

const V0_BIT: u8 = 1 << (V0_LABEL - 1);

/// Basis masks of ∧^grade V, in the order used for coordinates.
pub fn v_masks(grade: usize) -> Vec<u8> {
    basis_masks(grade).iter().copied().filter(|m| m & V0_BIT == 0).collect()
}

/// The multivector of W with the given coordinates on ∧^grade V.
pub fn embed(prime: Prime, grade: usize, coords: &[Fp]) -> MultiVector<Fp> {
    let mut out = MultiVector::zero(prime, grade);
    for (&m, c) in v_masks(grade).iter().zip(coords) {
        out.set(m, *c);
    }
    out
}

/// Coordinates on ∧^grade V; errors if there is a v0 component.
pub fn restrict(x: &MultiVector<Fp>) -> Result<Vec<Fp>> {
    if x.terms().any(|(m, c)| m & V0_BIT != 0 && !c.is_zero()) {
        return Err(Error::Precondition("multivector has a v0 component".into()));
    }
    Ok(v_masks(x.grade()).iter().map(|&m| *x.coeff(m)).collect())
}

pub fn v0(prime: Prime) -> MultiVector<Fp> {
    MultiVector::unit(prime, V0_LABEL)
}

/// vol5(x) = vol(x ∧ v0) for a 5-vector x of W.
pub fn vol5(x: &MultiVector<Fp>) -> Result<Fp> {
    x.wedge(&v0(x.ctx()))?.volume()
}

fn vector_of_v(prime: Prime, v: &[Fp]) -> Result<MultiVector<Fp>> {
    let mut full = v.to_vec();
    full.resize(DIM, Fp::zero(prime));
    MultiVector::vector(prime, &full)
}

/// A point of ℙ(K) whose bivector is decomposable (κ ∧ κ = 0), searched exhaustively.
pub fn decomposable_in_k(prime: Prime, k_rows: &[Vec<Fp>]) -> Result<Option<Vec<Fp>>> {
    for coeffs in projective_points_iter(prime, k_rows.len()) {
        let kappa = crate::linalg::vec_mat(prime, &coeffs, k_rows, FORM_DIM);
        let bivector = embed(prime, 2, &kappa);
        if bivector.wedge(&bivector)?.is_zero() {
            return Ok(Some(kappa));
        }
    }
    Ok(None)
}

/// A Lagrangian A = graph of a symmetric Q_A : ∧²V → ∧³V with kernel K, together with the
/// quadrics defining S_A ⊂ ℙ(K^⊥).
#[derive(Clone, Debug)]
pub struct SpecialLagrangian {
    prime: Prime,
    k_rows: Matrix<Fp>,
    /// b(α', α) = vol5(α' ∧ Q_A(α)).
    form: Matrix<Fp>,
    /// pairing[i][j] = vol5(e_{mask2_i} ∧ e_{mask3_j}).
    pairing: Matrix<Fp>,
    pairing_inverse: Matrix<Fp>,
    a: Lagrangian<Fp>,
    k_perp: LinearSubspace<Fp>,
}

/// Builds A from K (3 rows of ∧²V coordinates) and a nondegenerate symmetric 7×7 matrix
/// giving q_A on ∧²V/K.
pub fn build_special_a(prime: Prime, k_rows: &[Vec<Fp>], inner: &[Vec<Fp>]) -> Result<SpecialLagrangian> {
    if k_rows.len() != K_RANK || k_rows.iter().any(|r| r.len() != FORM_DIM) || rank(k_rows, FORM_DIM) != K_RANK {
        return Err(Error::Precondition("K must be a 3-dimensional subspace of ∧²V".into()));
    }
    let complement_dim = FORM_DIM - K_RANK;
    if inner.len() != complement_dim || !crate::linalg::is_symmetric(inner) || rank(inner, complement_dim) != complement_dim {
        return Err(Error::Precondition("symmetric data must be a nondegenerate 7×7 matrix".into()));
    }
    if let Some(kappa) = decomposable_in_k(prime, k_rows)? {
        return Err(Error::Degenerate(format!("ℙ(K) contains the decomposable bivector {}", embed(prime, 2, &kappa))));
    }
    let annihilator = kernel(prime, k_rows, FORM_DIM);
    let form = mat_mul(prime, &mat_mul(prime, &transpose(&annihilator, FORM_DIM), inner, complement_dim), &annihilator, FORM_DIM);
    let form_kernel = LinearSubspace::span(prime, FORM_DIM, &kernel(prime, &form, FORM_DIM))?;
    if form_kernel != LinearSubspace::span(prime, FORM_DIM, k_rows)? {
        return Err(Error::Inconsistent("the quadric q_A is not a cone over exactly K".into()));
    }
    let masks2 = v_masks(2);
    let masks3 = v_masks(3);
    let pairing: Matrix<Fp> = masks2
        .iter()
        .map(|&m2| {
            masks3
                .iter()
                .map(|&m3| {
                    let mut x = MultiVector::zero(prime, 2);
                    x.set(m2, Fp::one(prime));
                    let mut y = MultiVector::zero(prime, 3);
                    y.set(m3, Fp::one(prime));
                    vol5(&x.wedge(&y)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let pairing_inverse = inverse(prime, &pairing).ok_or_else(|| Error::Inconsistent("∧²V × ∧³V pairing is singular".into()))?;

    let mut rows = Vec::with_capacity(FORM_DIM);
    for i in 0..FORM_DIM {
        let mut alpha = vec![Fp::zero(prime); FORM_DIM];
        alpha[i] = Fp::one(prime);
        let beta = mat_vec(prime, &pairing_inverse, &mat_vec(prime, &form, &alpha));
        let row = v0(prime).wedge(&embed(prime, 2, &alpha))?.add(&embed(prime, 3, &beta))?;
        rows.push(row.into_coords());
    }
    let a = Lagrangian::from_rows(prime, &rows)?;
    let meet = a.meet_dim(&f_space(prime, &v0(prime).into_coords())?)?;
    if meet != K_RANK {
        return Err(Error::Inconsistent(format!("dim(A ∩ F_[v0]) = {meet}, expected 3")));
    }
    let k_perp = LinearSubspace::span(prime, FORM_DIM, &kernel(prime, &mat_mul(prime, k_rows, &pairing, FORM_DIM), FORM_DIM))?;
    Ok(SpecialLagrangian { prime, k_rows: k_rows.to_vec(), form, pairing, pairing_inverse, a, k_perp })
}

/// Random K (decomposable-free) and random nondegenerate symmetric data.
pub fn random_special_a<R: Rng + ?Sized>(prime: Prime, rng: &mut R, attempts: usize) -> Result<SpecialLagrangian> {
    for _ in 0..attempts {
        let k_rows: Matrix<Fp> = (0..K_RANK).map(|_| (0..FORM_DIM).map(|_| Fp::random(prime, rng)).collect()).collect();
        let inner = random_symmetric(prime, FORM_DIM - K_RANK, rng);
        match build_special_a(prime, &k_rows, &inner) {
            Ok(data) => return Ok(data),
            Err(Error::Precondition(_) | Error::Degenerate(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::RetriesExhausted(attempts))
}

impl SpecialLagrangian {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn lagrangian(&self) -> &Lagrangian<Fp> {
        &self.a
    }

    pub fn k_rows(&self) -> &Matrix<Fp> {
        &self.k_rows
    }

    pub fn k_perp(&self) -> &LinearSubspace<Fp> {
        &self.k_perp
    }

    /// The symmetric matrix of q_A on ∧²V.
    pub fn form(&self) -> &Matrix<Fp> {
        &self.form
    }

    /// Q_A(α) as ∧³V coordinates.
    pub fn q_map(&self, alpha: &[Fp]) -> Vec<Fp> {
        mat_vec(self.prime, &self.pairing_inverse, &mat_vec(self.prime, &self.form, alpha))
    }

    /// Some α with Q_A(α) = β; defined modulo K.
    pub fn preimage(&self, beta: &[Fp]) -> Result<Vec<Fp>> {
        let rhs = mat_vec(self.prime, &self.pairing, beta);
        solve(self.prime, &self.form, &rhs, FORM_DIM).ok_or_else(|| Error::Precondition("β is not in K^⊥ = image of Q_A".into()))
    }

    /// q_A*(β) = vol5(α ∧ β) where Q_A(α) = β.
    pub fn q_a_star(&self, beta: &[Fp]) -> Result<Fp> {
        let alpha = self.preimage(beta)?;
        self.pair(&alpha, beta)
    }

    /// vol5(α ∧ β) for α ∈ ∧²V, β ∈ ∧³V.
    pub fn pair(&self, alpha: &[Fp], beta: &[Fp]) -> Result<Fp> {
        Ok(crate::linalg::dot(self.prime, &mat_vec(self.prime, &self.pairing, beta), alpha))
    }

    /// The Plücker quadric q_{e_i*}(β) = vol5(ι_{e_i*}β ∧ β), for i in 1..=5.
    pub fn plucker_quadric(&self, label: usize, beta: &[Fp]) -> Result<Fp> {
        let omega = embed(self.prime, 3, beta);
        vol5(&omega.contract_basis(label)?.wedge(&omega)?)
    }

    /// Values of the six quadrics: q_{e_1*}, …, q_{e_5*}, q_A*. Index 5 pairs with v0.
    pub fn quadric_values(&self, beta: &[Fp]) -> Result<[Fp; QUADRIC_COUNT]> {
        let mut out = [Fp::zero(self.prime); QUADRIC_COUNT];
        for (i, slot) in out.iter_mut().take(V_DIM).enumerate() {
            *slot = self.plucker_quadric(i + 1, beta)?;
        }
        out[V_DIM] = self.q_a_star(beta)?;
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "prime": self.prime.get(),
            "v0": "e6",
            "K": self.k_rows.iter().map(|r| r.iter().map(|x| x.value()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "A": self.a.to_json(),
        })
    }
}

/// A point of S_A: a decomposable β ∈ K^⊥ with q_A*(β) = 0, and U_β with ∧³U_β = ⟨β⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint {
    beta: Vec<Fp>,
    subspace: LinearSubspace<Fp>,
}

impl SurfacePoint {
    /// Checks all six defining equations and returns the point with its witness.
    pub fn verify(data: &SpecialLagrangian, beta: &[Fp]) -> Result<SurfacePoint> {
        if beta.len() != FORM_DIM || beta.iter().all(Fp::is_zero) {
            return Err(Error::ZeroVector);
        }
        if !data.k_perp.contains(beta) {
            return Err(Error::Precondition("β is not in K^⊥".into()));
        }
        let subspace = is_decomposable(&embed(data.prime, 3, beta))?
            .ok_or_else(|| Error::Precondition("β is not decomposable".into()))?;
        if data.quadric_values(beta)?.iter().any(|q| !q.is_zero()) {
            return Err(Error::Precondition("β does not satisfy the six quadrics".into()));
        }
        Ok(SurfacePoint { beta: beta.to_vec(), subspace })
    }

    pub fn beta(&self) -> &[Fp] {
        &self.beta
    }

    /// U_β ⊂ V, as a subspace of W.
    pub fn subspace(&self) -> &LinearSubspace<Fp> {
        &self.subspace
    }

    pub fn same_point(&self, other: &SurfacePoint) -> bool {
        rank(&[self.beta.clone(), other.beta.clone()], FORM_DIM) == 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "beta": self.beta.iter().map(|x| x.value()).collect::<Vec<_>>(),
            "U": self.subspace.basis().iter().map(|r| r.iter().map(|x| x.value()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Symmetric Gram matrix of a quadratic function on F_p^n, by polarization.
fn gram<Q: Fn(&[Fp]) -> Result<Fp>>(prime: Prime, n: usize, q: Q) -> Result<Matrix<Fp>> {
    let unit = |i: usize| {
        let mut v = vec![Fp::zero(prime); n];
        v[i] = Fp::one(prime);
        v
    };
    let diag: Vec<Fp> = (0..n).map(|i| q(&unit(i))).collect::<Result<_>>()?;
    let half = prime.element(2).inv().ok_or(Error::InvalidPrime(2))?;
    let mut g = vec![vec![Fp::zero(prime); n]; n];
    for i in 0..n {
        g[i][i] = diag[i];
        for j in i + 1..n {
            let mut sum = unit(i);
            sum[j] = Fp::one(prime);
            let cross = (q(&sum)? - diag[i] - diag[j]) * half;
            g[i][j] = cross;
            g[j][i] = cross;
        }
    }
    Ok(g)
}

fn quadratic_value(g: &[Vec<Fp>], c: &[Fp]) -> Fp {
    let prime = c[0].ctx();
    let mut acc = Fp::zero(prime);
    for i in 0..c.len() {
        if c[i].is_zero() {
            continue;
        }
        let mut row = Fp::zero(prime);
        for j in 0..c.len() {
            row = row + g[i][j] * c[j];
        }
        acc = acc + c[i] * row;
    }
    acc
}

/// Representatives of ℙ^{n−1}(F_p), first nonzero coordinate equal to 1, generated lazily.
pub fn projective_points_iter(prime: Prime, n: usize) -> impl Iterator<Item = Vec<Fp>> {
    let p = prime.get() as u64;
    (0..n).flat_map(move |lead| {
        let free = n - 1 - lead;
        (0..p.pow(free as u32)).map(move |mut index| {
            let mut v = vec![Fp::zero(prime); n];
            v[lead] = Fp::one(prime);
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = prime.element((index % p) as i64);
                index /= p;
            }
            v
        })
    })
}

/// Points of S_A of the form u1 ∧ γ. The conditions vol5(κ_j ∧ u1 ∧ γ) = 0 cut u1 ∧ ∧²V down
/// to a plane in ℙ(K^⊥); on it, decomposability (u1 ∧ γ ∧ γ = 0) and q_A* = 0 are two conics,
/// whose common F_p-points are enumerated in random order. None when the draw is degenerate
/// or the conics share no F_p-point.
pub fn sample_through<R: Rng + ?Sized>(data: &SpecialLagrangian, u1: &[Fp], rng: &mut R) -> Result<Option<SurfacePoint>> {
    let prime = data.prime;
    if u1.len() != V_DIM {
        return Err(Error::DimensionMismatch(format!("u1 has {} coordinates, V has 5", u1.len())));
    }
    if u1.iter().all(Fp::is_zero) {
        return Ok(None);
    }
    let u = vector_of_v(prime, u1)?;
    let masks2 = v_masks(2);
    let conditions: Matrix<Fp> = data
        .k_rows
        .iter()
        .map(|kappa| {
            let ku = embed(prime, 2, kappa).wedge(&u)?;
            masks2
                .iter()
                .map(|&m| {
                    let mut g = MultiVector::zero(prime, 2);
                    g.set(m, Fp::one(prime));
                    vol5(&ku.wedge(&g)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut gammas = Vec::new();
    let mut betas: Matrix<Fp> = Vec::new();
    for gamma in kernel(prime, &conditions, FORM_DIM) {
        let beta = restrict(&u.wedge(&embed(prime, 2, &gamma))?)?;
        let mut trial = betas.clone();
        trial.push(beta.clone());
        if rank(&trial, FORM_DIM) > betas.len() {
            betas.push(beta);
            gammas.push(gamma);
        }
    }
    if betas.len() != 3 {
        return Ok(None);
    }
    let combine = |rows: &Matrix<Fp>, c: &[Fp]| crate::linalg::vec_mat(prime, c, rows, FORM_DIM);
    let decomposability = gram(prime, 3, |c| {
        let g = embed(prime, 2, &combine(&gammas, c));
        vol5(&u.wedge(&g)?.wedge(&g)?)
    })?;
    let dual_quadric = gram(prime, 3, |c| data.q_a_star(&combine(&betas, c)))?;
    // Enumerate ℙ² through a random projective transformation, so the first hit is random.
    let transform = loop {
        let m: Matrix<Fp> = (0..3).map(|_| (0..3).map(|_| Fp::random(prime, rng)).collect()).collect();
        if rank(&m, 3) == 3 {
            break m;
        }
    };
    for point in projective_points_iter(prime, 3) {
        let c = mat_vec(prime, &transform, &point);
        if quadratic_value(&decomposability, &c).is_zero() && quadratic_value(&dual_quadric, &c).is_zero() {
            return SurfacePoint::verify(data, &combine(&betas, &c)).map(Some);
        }
    }
    Ok(None)
}

/// A point of S_A from random u1 ∈ V; also returns the number of draws used.
pub fn sample_s_a_point<R: Rng + ?Sized>(data: &SpecialLagrangian, rng: &mut R, max_attempts: usize) -> Result<(SurfacePoint, usize)> {
    for attempt in 1..=max_attempts {
        let u1: Vec<Fp> = (0..V_DIM).map(|_| Fp::random(data.prime, rng)).collect();
        if let Some(point) = sample_through(data, &u1, rng)? {
            return Ok((point, attempt));
        }
    }
    Err(Error::RetriesExhausted(max_attempts))
}

pub const SAMPLE_ATTEMPTS: usize = 64;

/// φ({β1, β2}) ∈ W: the hyperplane of quadrics t·q_{v*} + t0·q_A* containing the line ⟨β1, β2⟩,
/// read through W^∨∨ = W. Coordinate i < 5 is the polar value of q_{e_{i+1}*}, coordinate 5
/// (v0) the polar value of q_A*.
pub fn phi(data: &SpecialLagrangian, b1: &SurfacePoint, b2: &SurfacePoint) -> Result<Vec<Fp>> {
    let prime = data.prime;
    if b1.same_point(b2) {
        return Err(Error::Precondition("φ needs two distinct points".into()));
    }
    let midpoint: Vec<Fp> = b1.beta.iter().zip(&b2.beta).map(|(x, y)| *x + *y).collect();
    if is_decomposable(&embed(prime, 3, &midpoint))?.is_some() {
        return Err(Error::Precondition("the line ⟨β1, β2⟩ lies in G(3,V)".into()));
    }
    let at_sum = data.quadric_values(&midpoint)?;
    let at_first = data.quadric_values(&b1.beta)?;
    let at_second = data.quadric_values(&b2.beta)?;
    let w: Vec<Fp> = (0..QUADRIC_COUNT).map(|i| at_sum[i] - at_first[i] - at_second[i]).collect();
    if w.iter().all(Fp::is_zero) {
        return Err(Error::Degenerate("every quadric of S_A contains the line ⟨β1, β2⟩".into()));
    }
    Ok(w)
}

/// dim(A ∩ F_[w]); at least 1 exactly when [w] lies on the EPW sextic of A.
pub fn sextic_multiplicity(data: &SpecialLagrangian, w: &[Fp]) -> Result<usize> {
    data.a.meet_dim(&f_space(data.prime, w)?)
}

/// ψ of a triple, computed two ways.
#[derive(Clone, Debug)]
pub struct PsiResult {
    /// Span of φ(β1,β2), φ(β1,β3), φ(β2,β3).
    pub via_phi: LinearSubspace<Fp>,
    /// Common zeros in W of the functionals whose quadrics vanish on the plane ⟨β1, β2, β3⟩.
    pub via_quadrics: LinearSubspace<Fp>,
}

impl PsiResult {
    pub fn agree(&self) -> bool {
        self.via_phi == self.via_quadrics
    }
}

pub fn psi(data: &SpecialLagrangian, points: [&SurfacePoint; 3]) -> Result<PsiResult> {
    let prime = data.prime;
    let [b1, b2, b3] = points;
    let phis = vec![phi(data, b1, b2)?, phi(data, b1, b3)?, phi(data, b2, b3)?];
    if rank(&phis, DIM) != 3 {
        return Err(Error::Degenerate("the three φ values are linearly dependent".into()));
    }
    let via_phi = LinearSubspace::span(prime, DIM, &phis)?;

    // A quadric on a plane is fixed by its values at the vertices and edge midpoints.
    let sum = |x: &SurfacePoint, y: &SurfacePoint| -> Vec<Fp> { x.beta.iter().zip(&y.beta).map(|(a, b)| *a + *b).collect() };
    let samples = [b1.beta.clone(), b2.beta.clone(), b3.beta.clone(), sum(b1, b2), sum(b1, b3), sum(b2, b3)];
    let values: Matrix<Fp> = samples.iter().map(|s| data.quadric_values(s).map(|v| v.to_vec())).collect::<Result<_>>()?;
    let functionals = kernel(prime, &values, QUADRIC_COUNT);
    let via_quadrics = LinearSubspace::span(prime, DIM, &kernel(prime, &functionals, DIM))?;
    Ok(PsiResult { via_phi, via_quadrics })
}

/// dim(A ∩ T_U) for U = ψ.
pub fn cube_multiplicity(data: &SpecialLagrangian, u: &LinearSubspace<Fp>) -> Result<usize> {
    data.a.meet_dim(&tangent_space(u)?)
}

fn subspace_json(u: &LinearSubspace<Fp>) -> Value {
    Value::from(u.basis().iter().map(|r| r.iter().map(|x| x.value()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn psi_json(result: &PsiResult) -> Value {
    json!({"via_phi": subspace_json(&result.via_phi), "agree": result.agree()})
}
