//! Given β1, β2, β3 ∈ S_A, the three further points of S_A with the same ψ.
//!
//! Let U' = ⟨U1∩U2, U1∩U3, U2∩U3⟩. A point β of G(3,V) ∩ ℙ(K^⊥) whose plane meets U' in
//! dimension ≥ 2 is determined by π = ∧²(U_β ∩ U') on a conic in ℙ(∧²U'), and these β sweep a
//! twisted cubic through β1, β2, β3. The sextic q_A* restricted to that cubic vanishes at the
//! three parameters of the β_i; the residual cubic factor gives γ1, γ2, γ3.

use rand::Rng;
use serde_json::{json, Value};

use super::normal_form::proportional;
use super::{psi, restrict, sample_s_a_point, vol5, SpecialLagrangian, SurfacePoint, FORM_DIM, SAMPLE_ATTEMPTS, V_DIM};
use crate::error::{Error, Result};
use crate::exterior::{MultiVector, DIM};
use crate::linalg::{determinant, rank, solve, transpose, LinearSubspace, Matrix};
use crate::poly::Interpolator;
use crate::scalar::{Field, Fp, Prime};

/// A binary form of degree len − 1; entry i is the coefficient of s^{d−i} t^i.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm {
    prime: Prime,
    coeffs: Vec<Fp>,
}

impl BinaryForm {
    pub fn new(prime: Prime, coeffs: Vec<Fp>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        BinaryForm { prime, coeffs }
    }

    pub fn constant(prime: Prime, value: Fp) -> Self {
        BinaryForm::new(prime, vec![value])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Fp::is_zero)
    }

    pub fn add(&self, other: &BinaryForm) -> Result<BinaryForm> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch(format!("adding forms of degree {} and {}", self.degree(), other.degree())));
        }
        Ok(BinaryForm::new(self.prime, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect()))
    }

    pub fn sub(&self, other: &BinaryForm) -> Result<BinaryForm> {
        self.add(&other.scale(-Fp::one(self.prime)))
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        BinaryForm::new(self.prime, crate::poly::mul(self.prime, &self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, factor: Fp) -> BinaryForm {
        BinaryForm::new(self.prime, self.coeffs.iter().map(|c| *c * factor).collect())
    }

    pub fn evaluate(&self, point: ProjectivePoint) -> Fp {
        let (s, t) = (point.0, point.1);
        let d = self.degree();
        let mut acc = Fp::zero(self.prime);
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = acc + *c * pow(s, d - i) * pow(t, i);
        }
        acc
    }

    /// The quotient by t0·s − s0·t, the linear form vanishing at (s0 : t0).
    pub fn divide_by_root(&self, point: ProjectivePoint) -> Result<BinaryForm> {
        let (s0, t0) = (point.0, point.1);
        let d = self.degree();
        if d == 0 {
            return Err(Error::Precondition("cannot divide a constant form".into()));
        }
        let mut quotient = vec![Fp::zero(self.prime); d];
        if let Some(t_inverse) = t0.inv() {
            quotient[0] = self.coeffs[0] * t_inverse;
            for k in 1..d {
                quotient[k] = (self.coeffs[k] + s0 * quotient[k - 1]) * t_inverse;
            }
            if self.coeffs[d] + s0 * quotient[d - 1] != Fp::zero(self.prime) {
                return Err(Error::Precondition("form does not vanish at the given point".into()));
            }
        } else {
            let s_inverse = s0.inv().ok_or(Error::ZeroVector)?;
            if !self.coeffs[0].is_zero() {
                return Err(Error::Precondition("form does not vanish at the given point".into()));
            }
            for k in 1..=d {
                quotient[k - 1] = -(self.coeffs[k] * s_inverse);
            }
        }
        Ok(BinaryForm::new(self.prime, quotient))
    }

    /// Zeros in ℙ¹(F_p), each listed once.
    pub fn roots(&self) -> Vec<ProjectivePoint> {
        projective_line(self.prime).into_iter().filter(|pt| self.evaluate(*pt).is_zero()).collect()
    }
}

fn pow(x: Fp, exp: usize) -> Fp {
    (0..exp).fold(Fp::one(x.ctx()), |acc, _| acc * x)
}

/// A point (s : t) of ℙ¹, normalized to (1 : t) or (0 : 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjectivePoint(pub Fp, pub Fp);

pub fn projective_line(prime: Prime) -> Vec<ProjectivePoint> {
    let mut out: Vec<ProjectivePoint> =
        (0..prime.get() as i64).map(|t| ProjectivePoint(Fp::one(prime), prime.element(t))).collect();
    out.push(ProjectivePoint(Fp::zero(prime), Fp::one(prime)));
    out
}

#[derive(Clone, Debug)]
pub struct ResidualTriple {
    pub gammas: [SurfacePoint; 3],
    /// Parameters of β1, β2, β3 on the twisted cubic.
    pub beta_parameters: [ProjectivePoint; 3],
    pub gamma_parameters: [ProjectivePoint; 3],
    /// The six parameters are pairwise distinct.
    pub distinct: bool,
    /// ψ(γ1, γ2, γ3) = ψ(β1, β2, β3).
    pub same_psi: bool,
}

impl ResidualTriple {
    pub fn to_json(&self) -> Value {
        let param = |p: &ProjectivePoint| [p.0.value(), p.1.value()];
        json!({
            "gammas": self.gammas.iter().map(SurfacePoint::to_json).collect::<Vec<_>>(),
            "beta_parameters": self.beta_parameters.iter().map(param).collect::<Vec<_>>(),
            "gamma_parameters": self.gamma_parameters.iter().map(param).collect::<Vec<_>>(),
            "distinct": self.distinct,
            "same_psi": self.same_psi,
        })
    }
}

fn line_of(a: &LinearSubspace<Fp>, b: &LinearSubspace<Fp>) -> Result<Vec<Fp>> {
    let meet = a.intersect(b)?;
    if meet.dim() != 1 {
        return Err(Error::Degenerate(format!("U_β ∩ U_β' has dimension {}, expected 1", meet.dim())));
    }
    Ok(meet.basis()[0].clone())
}

/// Pairs (a, b), a < b, indexing the basis u_a ∧ u_b of ∧²U'.
const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

struct ConicData {
    prime: Prime,
    /// vol5(κ_r ∧ ∧³U').
    constant: [Fp; 3],
    /// linear[k][r][c] = vol5(κ_r ∧ u_a∧u_b ∧ f_c) for PAIRS[k] = (a, b).
    linear: [[[Fp; 2]; 3]; 3],
}

impl ConicData {
    fn matrix(&self, pi: &[Fp]) -> Matrix<Fp> {
        (0..3)
            .map(|r| {
                let mut row = vec![self.constant[r]];
                for c in 0..2 {
                    row.push((0..3).fold(Fp::zero(self.prime), |acc, k| acc + pi[k] * self.linear[k][r][c]));
                }
                row
            })
            .collect()
    }

    fn quadric(&self, pi: &[Fp]) -> Fp {
        determinant(self.prime, &self.matrix(pi))
    }

    fn polar(&self, x: &[Fp], y: &[Fp]) -> Fp {
        let sum: Vec<Fp> = x.iter().zip(y).map(|(a, b)| *a + *b).collect();
        self.quadric(&sum) - self.quadric(x) - self.quadric(y)
    }
}

/// The residual triple, or None when the residual cubic does not have three distinct roots in
/// ℙ¹(F_p); the caller then retries with another configuration.
pub fn residual_triple(data: &SpecialLagrangian, points: [&SurfacePoint; 3]) -> Result<Option<ResidualTriple>> {
    let prime = data.prime();
    let [u1, u2, u3] = points.map(SurfacePoint::subspace);
    let lines = [line_of(u1, u2)?, line_of(u1, u3)?, line_of(u2, u3)?];
    let u_prime = LinearSubspace::span(prime, DIM, &lines)?;
    if u_prime.dim() != 3 {
        return Err(Error::Degenerate("the three pairwise meets are coplanar".into()));
    }
    let mut complement: Vec<Vec<Fp>> = Vec::new();
    let mut spanned = lines.to_vec();
    for label in 1..=V_DIM {
        let mut e = vec![Fp::zero(prime); DIM];
        e[label - 1] = Fp::one(prime);
        spanned.push(e.clone());
        if rank(&spanned, DIM) == spanned.len() {
            complement.push(e);
        } else {
            spanned.pop();
        }
    }
    let vectors: Vec<MultiVector<Fp>> = lines.iter().map(|v| MultiVector::vector(prime, v)).collect::<Result<_>>()?;
    let extras: Vec<MultiVector<Fp>> = complement.iter().map(|v| MultiVector::vector(prime, v)).collect::<Result<_>>()?;
    let top = vectors[0].wedge(&vectors[1])?.wedge(&vectors[2])?;
    let pair_bivectors: Vec<MultiVector<Fp>> =
        PAIRS.iter().map(|&(a, b)| vectors[a].wedge(&vectors[b])).collect::<Result<_>>()?;
    // pair_with_extra[k][c] = u_a ∧ u_b ∧ f_c.
    let pair_with_extra: Vec<Vec<MultiVector<Fp>>> = pair_bivectors
        .iter()
        .map(|pb| extras.iter().map(|f| pb.wedge(f)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let kappas: Vec<MultiVector<Fp>> = data.k_rows().iter().map(|k| super::embed(prime, 2, k)).collect();
    let mut constant = [Fp::zero(prime); 3];
    let mut linear = [[[Fp::zero(prime); 2]; 3]; 3];
    for (r, kappa) in kappas.iter().enumerate() {
        constant[r] = vol5(&kappa.wedge(&top)?)?;
        for k in 0..3 {
            for c in 0..2 {
                linear[k][r][c] = vol5(&kappa.wedge(&pair_with_extra[k][c])?)?;
            }
        }
    }
    let conic = ConicData { prime, constant, linear };

    // π_i = ∧²(U_βi ∩ U') in the basis u_a ∧ u_b.
    let line_matrix = transpose(&lines.to_vec(), DIM);
    let mut pis: Vec<Vec<Fp>> = Vec::with_capacity(3);
    for u in [u1, u2, u3] {
        let meet = u.intersect(&u_prime)?;
        if meet.dim() != 2 {
            return Err(Error::Degenerate("U_β meets U' in dimension other than 2".into()));
        }
        let coords: Vec<Vec<Fp>> = meet
            .basis()
            .iter()
            .map(|v| solve(prime, &line_matrix, v, 3).ok_or_else(|| Error::Inconsistent("vector of U' has no coordinates".into())))
            .collect::<Result<_>>()?;
        let (x, y) = (&coords[0], &coords[1]);
        let pi: Vec<Fp> = PAIRS.iter().map(|&(a, b)| x[a] * y[b] - x[b] * y[a]).collect();
        if !conic.quadric(&pi).is_zero() {
            return Err(Error::Inconsistent("∧²(U_β ∩ U') is off the conic".into()));
        }
        pis.push(pi);
    }

    // π(s,t) = Q(d)·π1 − P(π1, d)·d with d = s·π2 + t·π3.
    let (p1, d1, d2) = (&pis[0], &pis[1], &pis[2]);
    let q_d = BinaryForm::new(prime, vec![conic.quadric(d1), conic.polar(d1, d2), conic.quadric(d2)]);
    let p_d = BinaryForm::new(prime, vec![conic.polar(p1, d1), conic.polar(p1, d2)]);
    let pi_forms: Vec<BinaryForm> = (0..3)
        .map(|k| q_d.scale(p1[k]).sub(&p_d.mul(&BinaryForm::new(prime, vec![d1[k], d2[k]]))))
        .collect::<Result<_>>()?;

    // Entries of M(π(s,t)): column 0 constant, columns 1 and 2 quadratic.
    let entry = |r: usize, c: usize| -> Result<BinaryForm> {
        if c == 0 {
            return Ok(BinaryForm::constant(prime, conic.constant[r]));
        }
        let mut acc = BinaryForm::new(prime, vec![Fp::zero(prime); 3]);
        for (k, form) in pi_forms.iter().enumerate() {
            acc = acc.add(&form.scale(conic.linear[k][r][c - 1]))?;
        }
        Ok(acc)
    };
    let m: Vec<Vec<BinaryForm>> = (0..3).map(|r| (0..3).map(|c| entry(r, c)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let minor = |c0: usize, c1: usize| -> Result<BinaryForm> { m[1][c0].mul(&m[2][c1]).sub(&m[1][c1].mul(&m[2][c0])) };
    let top_weight = minor(1, 2)?;
    let extra_weights = [minor(0, 2)?.scale(-Fp::one(prime)), minor(0, 1)?];
    // Row 0 must be annihilated too, since det M vanishes along the conic.
    let row0 = m[0][0]
        .mul(&top_weight)
        .add(&m[0][1].mul(&extra_weights[0]))?
        .add(&m[0][2].mul(&extra_weights[1]))?;
    if !row0.is_zero() {
        return Err(Error::Inconsistent("kernel of M(π) does not annihilate the first row".into()));
    }

    // β(s,t) = t0·∧³U' + π ∧ (c1 f1 + c2 f2), coordinatewise on ∧³V; degree 4.
    let top_v = restrict(&top)?;
    let extra_v: Vec<Vec<Vec<Fp>>> =
        pair_with_extra.iter().map(|row| row.iter().map(restrict).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let products: Vec<Vec<BinaryForm>> =
        pi_forms.iter().map(|pf| extra_weights.iter().map(|w| pf.mul(w)).collect()).collect();
    let mut curve: Vec<BinaryForm> = Vec::with_capacity(FORM_DIM);
    for i in 0..FORM_DIM {
        let mut acc = top_weight.scale(top_v[i]);
        for k in 0..3 {
            for c in 0..2 {
                acc = acc.add(&products[k][c].scale(extra_v[k][c][i]))?;
            }
        }
        curve.push(acc);
    }
    if curve.iter().all(BinaryForm::is_zero) {
        return Err(Error::Degenerate("the curve of planes collapsed".into()));
    }
    // Remove base points.
    loop {
        let base = projective_line(prime).into_iter().find(|pt| curve.iter().all(|f| f.evaluate(*pt).is_zero()));
        match base {
            Some(pt) => curve = curve.iter().map(|f| f.divide_by_root(pt)).collect::<Result<_>>()?,
            None => break,
        }
    }
    if curve[0].degree() != 3 {
        return Err(Error::Degenerate(format!("curve has degree {} after removing base points", curve[0].degree())));
    }
    let coefficient_vectors: Matrix<Fp> = (0..4).map(|j| curve.iter().map(|f| f.coeffs()[j]).collect()).collect();
    if rank(&coefficient_vectors, FORM_DIM) != 4 {
        return Err(Error::Degenerate("curve is not a twisted cubic".into()));
    }
    let beta_at = |pt: ProjectivePoint| -> Vec<Fp> { curve.iter().map(|f| f.evaluate(pt)).collect() };

    // The sextic q_A* ∘ β from seven affine samples.
    let interpolator = Interpolator::consecutive(prime, 7)?;
    let values: Vec<Fp> = interpolator
        .nodes()
        .iter()
        .map(|t| data.q_a_star(&beta_at(ProjectivePoint(Fp::one(prime), *t))))
        .collect::<Result<_>>()?;
    let mut sextic = BinaryForm::new(prime, interpolator.coefficients(&values));
    if sextic.is_zero() {
        return Err(Error::Degenerate("the twisted cubic lies in S_A".into()));
    }
    let line = projective_line(prime);
    let mut beta_parameters = Vec::with_capacity(3);
    for point in points {
        let parameter = line
            .iter()
            .copied()
            .find(|pt| {
                let b = beta_at(*pt);
                !b.iter().all(Fp::is_zero) && proportional(&b, point.beta())
            })
            .ok_or_else(|| Error::Inconsistent("β is not on the twisted cubic".into()))?;
        sextic = sextic.divide_by_root(parameter)?;
        beta_parameters.push(parameter);
    }
    let roots = sextic.roots();
    if roots.len() != 3 {
        return Ok(None);
    }
    let gammas: Vec<SurfacePoint> = roots
        .iter()
        .map(|pt| SurfacePoint::verify(data, &beta_at(*pt)).map_err(|e| Error::Inconsistent(format!("residual point is off S_A: {e}"))))
        .collect::<Result<_>>()?;
    let mut all = beta_parameters.clone();
    all.extend(roots.iter().copied());
    let distinct = (0..all.len()).all(|i| (0..i).all(|j| all[i] != all[j]));
    let same_psi = psi(data, [&gammas[0], &gammas[1], &gammas[2]])?.via_phi == psi(data, points)?.via_phi;
    Ok(Some(ResidualTriple {
        gammas: gammas.try_into().expect("three roots"),
        beta_parameters: beta_parameters.try_into().expect("three points"),
        gamma_parameters: roots.try_into().expect("three roots"),
        distinct,
        same_psi,
    }))
}

/// Outcome of [`residual_search`].
#[derive(Clone, Debug)]
pub struct ResidualSearch {
    pub found: Option<([SurfacePoint; 3], ResidualTriple)>,
    /// Configurations tried, including the successful one.
    pub configurations: usize,
    /// Configurations discarded because a residual parameter coincided with a β parameter.
    pub coincident: usize,
}

/// Samples fresh triples until one has a residual cubic with three distinct F_p roots, none
/// of them at a parameter of β1, β2, β3. Over F_p such coincidences occur with probability
/// of order 1/p and are treated like non-split cubics.
pub fn residual_search<R: Rng + ?Sized>(data: &SpecialLagrangian, rng: &mut R, budget: usize) -> Result<ResidualSearch> {
    let mut coincident = 0;
    for attempt in 1..=budget {
        let mut pts = Vec::with_capacity(3);
        for _ in 0..3 {
            pts.push(sample_s_a_point(data, rng, SAMPLE_ATTEMPTS)?.0);
        }
        match residual_triple(data, [&pts[0], &pts[1], &pts[2]]) {
            Ok(Some(found)) if found.distinct => {
                let betas = pts.try_into().expect("three points");
                return Ok(ResidualSearch { found: Some((betas, found)), configurations: attempt, coincident });
            }
            Ok(Some(_)) => coincident += 1,
            Ok(None) | Err(Error::Degenerate(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(ResidualSearch { found: None, configurations: budget, coincident })
}
